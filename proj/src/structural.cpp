#include "ipclab/structural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "ipclab/errors.hpp"
#include "ipclab/io.hpp"

namespace ipclab {

namespace {

constexpr double kPoissonExactMax = 1e12;

double pareto_point(double a, double x) { return -std::pow(x, -a) * std::expm1(-a * std::log1p(1.0 / x)); }

double log_binom_pmf(double n, double k, double log_p, double log_q) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * log_p + (n - k) * log_q;
}

double poisson_checked(Philox& rng, double mean, bool* approx) {
  if (mean > kPoissonExactMax && approx) *approx = true;
  return poisson(rng, mean);
}

// y on [N, inf) with density proportional to
//   y^-a            on [N, L]
//   L^-a e^{-lam (y - L)} on [L, inf),  L = max(N, 1/lam)
double sample_tail_envelope(double a, double lam, double N, Philox& rng, double* h_at) {
  if (lam == 0.0) {
    // pure power law, a > 1
    const double y = N * std::pow(uniform_open(rng), -1.0 / (a - 1.0));
    *h_at = std::pow(y, -a);
    return y;
  }
  const double L = std::max(N, 1.0 / lam);
  double A1 = 0.0;
  if (L > N) A1 = a == 1.0 ? std::log(L / N) : (std::pow(L, 1.0 - a) - std::pow(N, 1.0 - a)) / (1.0 - a);
  const double A2 = std::pow(L, -a) / lam;
  if (uniform01(rng) * (A1 + A2) < A1) {
    const double v = uniform01(rng);
    double y;
    if (a == 1.0) {
      y = N * std::exp(v * std::log(L / N));
    } else {
      const double n1 = std::pow(N, 1.0 - a), l1 = std::pow(L, 1.0 - a);
      y = std::pow(n1 + v * (l1 - n1), 1.0 / (1.0 - a));
    }
    y = std::clamp(y, N, L);
    *h_at = std::pow(y, -a);
    return y;
  }
  const double y = L + exponential(rng) / lam;
  *h_at = std::pow(L, -a) * std::exp(-lam * (y - L));
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// finite-tree offspring law

TreeLaw::TreeLaw(const PercolationCurve& curve, double tau) : spec_(&curve.spec()) {
  const double pc = curve.p_c();
  w_ = tau >= curve.tau_max() ? 1.0 : std::min(1.0, pc + std::exp(tau));
  log_w_ = pc == 0.0 && tau < curve.tau_max() ? tau : std::log(w_);
  const double lt = curve.log_theta_tau(tau);
  theta_ = std::exp(lt);
  eta_ = -std::expm1(lt);
  log_eta_ = std::log1p(-theta_);
  mean_ = std::clamp(curve.stay_tau(tau), 0.0, 1.0);
  if (eta_ > 0.0 && eta_ < 0.5 && w_ < 1.0 && spec_->family() != Family::sibuya) {
    // eta = f(1 - w + w eta) contracts at rate mean_ here; a few steps
    // recover the relative precision the curve loses when theta is near 1
    for (int i = 0; i < 60; ++i) {
      const double next = gf(*spec_, 1.0 - w_ + w_ * eta_).f;
      const bool done = std::abs(next - eta_) <= 1e-16 * eta_;
      eta_ = next;
      if (done) break;
    }
    theta_ = 1.0 - eta_;
    log_eta_ = std::log(eta_);
    mean_ = w_ * gf(*spec_, 1.0 - w_ + w_ * eta_).f1;
  }
  if (!(eta_ > 0.0)) {
    // w = 1: every child survives, no finite trees exist
    var_ = 0.0;
    return;
  }
  // g''(1) = eta w^2 f''(1 - w theta)
  double g2 = 0.0;
  if (spec_->family() == Family::sibuya) {
    const double a = spec_->alpha();
    g2 = eta_ * a * (1.0 - a) / theta_;
  } else {
    const double u = eta_ < 0.5 ? w_ * theta_ : std::exp(log_w_ + lt);
    g2 = eta_ * w_ * w_ * gf_complement(*spec_, std::min(1.0, u)).f2;
  }
  var_ = std::max(0.0, g2 + mean_ - mean_ * mean_);
  if (mean_ >= 1.0 - 1e-12) throw ModelError("finite-tree offspring law is not subcritical for " + spec_->label());

  if (spec_->family() != Family::sibuya && eta_ < 0.25) {
    // the rejection sampler accepts with probability eta; tabulate instead
    double total = 0.0;
    const int kmax = static_cast<int>(std::ceil(std::log(1e-18) / log_eta_)) + 1;
    for (int k = 0; k <= kmax; ++k) {
      const double p = pmf(k);
      total += p;
      cdf_.push_back(total);
      if (1.0 - total < 1e-17) break;
    }
    for (double& c : cdf_) c /= total;
  }
}

double TreeLaw::progeny_variance() const noexcept {
  const double d = 1.0 - mean_;
  return var_ / (d * d * d);
}

double TreeLaw::pmf(std::int64_t k) const {
  if (k < 0) return 0.0;
  const double kk = static_cast<double>(k);
  if (spec_->family() == Family::sibuya) {
    const double wa = std::exp(spec_->alpha() * log_w_);
    if (k == 0) return (1.0 - wa) / eta_;
    return wa * std::exp((kk - 1.0) * log_eta_) * ipclab::pmf(*spec_, k);
  }
  // eta^{k-1} sum_{y>=k} C(y,k) w^k (1-w)^{y-k} P(X=y)
  const double lq = std::log1p(-w_);
  const double lw = log_w_;
  auto term = [&](double y, double py) {
    if (py <= 0.0) return 0.0;
    if (w_ >= 1.0) return y == kk ? py : 0.0;
    return std::exp(log_binom_pmf(y, kk, lw, lq)) * py;
  };
  double sum = 0.0;
  if (spec_->family() == Family::deterministic) {
    const double m = static_cast<double>(spec_->fixed_value());
    if (kk <= m) sum = term(m, 1.0);
  } else {
    const double a = spec_->alpha();
    const double mode = kk / std::max(w_, 1e-300);
    double y = std::max(1.0, kk);
    for (; y < 1e7; y += 1.0) {
      const double t = term(y, pareto_point(a, y));
      sum += t;
      if (y > 2.0 * mode + 50.0 && t < 1e-20 * sum) break;
    }
  }
  return std::exp((kk - 1.0) * log_eta_) * sum;
}

double TreeLaw::sample(Philox& rng) const {
  if (!cdf_.empty()) {
    const double v = uniform01(rng);
    return static_cast<double>(std::upper_bound(cdf_.begin(), cdf_.end(), v) - cdf_.begin());
  }
  if (spec_->family() == Family::sibuya) {
    const double wa = std::exp(spec_->alpha() * log_w_);
    for (;;) {
      if (!(uniform01(rng) < wa)) return 0.0;
      const double y = sample_real(*spec_, rng);
      if (uniform01(rng) < std::exp(y * log_eta_)) return y;
    }
  }
  for (;;) {
    const double x = sample_real(*spec_, rng);
    const double k = binomial(rng, x, w_);
    if (k == 0.0 || uniform01(rng) < std::exp(k * log_eta_)) return k;
  }
}

// ---------------------------------------------------------------------------
// level

LevelLaw::LevelLaw(const PercolationCurve& c, double t) : curve(&c), tau(t), tree(c, t) {
  w = tree.w();
  log_theta = c.log_theta_tau(tau);
  theta = std::exp(log_theta);
  eta = tree.eta();
  const double log_w = c.p_c() == 0.0 && tau < c.tau_max() ? tau : std::log(w);
  u = std::exp(log_w + log_theta);
  stay = tree.mean();
  if (!(u > 0.0)) throw ModelError("level weight underflow at log(w) = " + std::to_string(log_w));
  m1 = stay / w;
  if (!(w > 0.0)) m1 = std::numeric_limits<double>::infinity();
}

double LevelLaw::retention(Retention r) const {
  if (r == Retention::plain) return w;
  if (u >= 1.0) return 0.0;
  return std::clamp(w * eta / (1.0 - u), 0.0, 1.0);
}

double sample_backbone_degree(const LevelLaw& L, Philox& rng, bool* approx) {
  const OffspringSpec& spec = L.curve->spec();
  if (L.u >= 1.0) return 1.0;  // s = 0: only x = 1 has weight
  switch (spec.family()) {
    case Family::deterministic:
      return static_cast<double>(spec.fixed_value());
    case Family::sibuya: {
      // D - 1 ~ NegBin(1 - alpha, s): Poisson with Gamma(1 - alpha) mean scaled by s / u
      const double g = gamma(rng, 1.0 - spec.alpha());
      const double mean = g * (1.0 - L.u) / L.u;
      return 1.0 + poisson_checked(rng, mean, approx);
    }
    case Family::discrete_pareto: {
      const double a = spec.alpha();
      const double log_s = std::log1p(-L.u);
      const double lam = -log_s;
      const double m1 = gf_complement(spec, L.u, false).f1;
      if (!std::isfinite(m1)) throw DivergentMoment("backbone degree normaliser is infinite for " + spec.label());
      const auto& table = spec.pmf_table();
      const double N = static_cast<double>(table.size());
      const double target = uniform01(rng) * m1;
      double cum = 0.0, sx = 1.0;
      const double s = std::exp(log_s);
      for (std::size_t i = 0; i < table.size(); ++i) {
        const double x = static_cast<double>(i + 1);
        cum += x * table[i] * sx;
        if (target < cum) return x;
        sx *= s;
      }
      // tail x > N: rejection from a continuous envelope
      for (;;) {
        double h = 0.0;
        const double y = sample_tail_envelope(a, lam, N, rng, &h);
        const double x = std::floor(y) + 1.0;
        const double accept = x * pareto_point(a, x) * std::exp(-lam * (x - N)) / (a * h);
        if (uniform01(rng) < accept) return x;
      }
    }
  }
  return 1.0;
}

double sample_backbone_degree(const PercolationCurve& curve, double w, Philox& rng) {
  return sample_backbone_degree(LevelLaw(curve, w >= 1.0 ? curve.tau_max() : curve.tau_of(w)), rng);
}

double thin_degree(double D, double keep, ThinCount convention, Philox& rng, bool* approx) {
  const double n = convention == ThinCount::D ? D : D - 1.0;
  if (n <= 0.0 || keep <= 0.0) return 0.0;
  if (keep >= 1.0) return n;
  return binomial(rng, n, keep, approx);
}

double sum_uniform(double n, double w, double exact_max, Philox& rng) {
  if (n <= 0.0 || w <= 0.0) return 0.0;
  if (n <= exact_max) {
    double s = 0.0;
    for (double i = 0; i < n; i += 1.0) s += uniform01(rng);
    return w * s;
  }
  const double z = n / 2.0 + std::sqrt(n / 12.0) * normal(rng);
  return w * std::clamp(z, 0.0, n);
}

TreeSample sample_finite_tree(const TreeLaw& law, TreeEdges edges, Philox& rng, const StructuralOptions& opt,
                              std::vector<double>* weights) {
  double total = 1.0, pending = 1.0;
  while (pending > 0.0) {
    pending -= 1.0;
    const double k = law.sample(rng);
    total += k;
    pending += k;
    if (total > opt.tree_vertex_cap) throw ModelError("finite tree exceeded the vertex cap");
  }
  TreeSample t;
  t.vertices = total;
  t.edges = edges == TreeEdges::progeny ? total : total + 1.0;
  if (weights) {
    for (double i = 0; i < t.edges; i += 1.0) {
      const double x = law.w() * uniform01(rng);
      weights->push_back(x);
      t.weight_sum += x;
    }
  } else {
    t.weight_sum = sum_uniform(t.edges, law.w(), opt.exact_weight_sum_max, rng);
  }
  return t;
}

double sample_forest_vertices(const TreeLaw& law, double n, bool bulk, const StructuralOptions& opt, Philox& rng) {
  if (bulk) {
    // excess over one vertex per tree, Gamma with matched mean and variance
    const double mean = n * (law.progeny_mean() - 1.0);
    const double var = n * law.progeny_variance();
    if (mean > 0.0 && var > 0.0) return n + std::exp(log_gamma_variate(rng, mean * mean / var) + std::log(var / mean));
    return n + std::max(0.0, mean);
  }
  double vertices = 0.0;
  for (double i = 0; i < n; i += 1.0) {
    double total = 1.0, pending = 1.0;
    while (pending > 0.0) {
      pending -= 1.0;
      const double k = law.sample(rng);
      total += k;
      pending += k;
      if (total > opt.tree_vertex_cap) throw ModelError("finite tree exceeded the vertex cap");
    }
    vertices += total;
  }
  return vertices;
}

LevelSample sample_level(const LevelLaw& L, const StructuralOptions& opt, Philox& rng) {
  const Conventions& cv = opt.conventions;
  LevelSample out;
  out.w = L.w;
  bool approx = false;
  const double keep = L.retention(cv.retention);
  const OffspringSpec& spec = L.curve->spec();
  if (spec.family() == Family::sibuya && L.u < 1.0) {
    // Poisson thinning of the Gamma mixture is exact
    const double g = gamma(rng, 1.0 - spec.alpha());
    const double mean = g * (1.0 - L.u) / L.u;
    const double kept = poisson_checked(rng, mean * keep, &approx);
    const double dropped = poisson_checked(rng, mean * (1.0 - keep), &approx);
    out.D = 1.0 + kept + dropped;
    out.D_hat = kept;
    if (cv.thin == ThinCount::D && uniform01(rng) < keep) out.D_hat += 1.0;
  } else {
    out.D = sample_backbone_degree(L, rng, &approx);
    out.D_hat = thin_degree(out.D, keep, cv.thin, rng, &approx);
  }
  const double n = out.D_hat;
  const bool bulk = n > opt.bulk_tree_threshold || n * L.tree.progeny_mean() > opt.bulk_vertex_threshold;
  const double vertices = sample_forest_vertices(L.tree, n, bulk, opt, rng);
  if (bulk) approx = true;
  out.edges = cv.edges == TreeEdges::progeny ? vertices : vertices + n;
  out.B = sum_uniform(out.edges, L.w, opt.exact_weight_sum_max, rng);
  out.H = 1.0 + vertices;
  out.approx = approx;
  return out;
}

LevelSample sample_level(const PercolationCurve& curve, double tau, const StructuralOptions& opt, Philox& rng) {
  return sample_level(LevelLaw(curve, tau), opt, rng);
}

ClusterPath simulate_cluster_on(const PercolationCurve& curve, const ChainPath& chain, const StructuralOptions& opt,
                                Philox& rng) {
  ClusterPath out;
  out.chain = chain;
  out.conventions = opt.conventions;
  const std::size_t K = chain.w.size();
  out.levels.reserve(K);
  double M = 0.0, C = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    LevelSample s = sample_level(curve, chain.tau[k], opt, rng);
    s.k = k;
    M += s.H;
    C += s.B;
    if (k > 0 && opt.conventions.include_backbone_weights) C += chain.beta[k - 1];
    out.levels.push_back(s);
    out.M.push_back(M);
    out.C.push_back(C);
  }
  return out;
}

ClusterPath simulate_cluster(const PercolationCurve& curve, std::size_t K, const StructuralOptions& opt, Philox& rng) {
  const ChainPath chain = simulate_chain(curve, K, opt.conventions.beta, rng);
  return simulate_cluster_on(curve, chain, opt, rng);
}

std::string check_cluster_invariants(const ClusterPath& p) {
  std::string bad = check_chain_invariants(p.chain);
  if (!bad.empty()) return bad;
  for (std::size_t k = 0; k < p.M.size(); ++k) {
    const LevelSample& s = p.levels[k];
    if (!(s.D_hat <= s.D)) return "D_hat > D at k=" + std::to_string(k);
    if (!(s.B >= 0.0 && s.B <= s.edges * s.w)) return "B outside [0, edges w] at k=" + std::to_string(k);
    if (!(s.H >= 1.0 + s.D_hat)) return "H < 1 + D_hat at k=" + std::to_string(k);
    if (!(p.C[k] < p.M[k])) return "C_k >= M_k at k=" + std::to_string(k);
    if (k > 0 && !(p.C[k] >= p.C[k - 1])) return "C decreased at k=" + std::to_string(k);
    if (k > 0 && !(p.M[k] >= p.M[k - 1])) return "M decreased at k=" + std::to_string(k);
  }
  return {};
}

std::string cluster_csv_header() { return "rep,k,w_k,D,D_hat,H,B,M,C,approx\n"; }

void write_cluster_rows(std::ostream& os, std::size_t rep, const ClusterPath& p) {
  for (std::size_t k = 0; k < p.levels.size(); ++k) {
    const LevelSample& s = p.levels[k];
    os << rep << ',' << k << ',' << format_double(s.w) << ',' << format_double(s.D) << ','
       << format_double(s.D_hat) << ',' << format_double(s.H) << ',' << format_double(s.B) << ','
       << format_double(p.M[k]) << ',' << format_double(p.C[k]) << ',' << (s.approx ? 1 : 0) << '\n';
  }
}

}  // namespace ipclab
