#include "ipclab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ipclab/errors.hpp"
#include "ipclab/stats.hpp"

namespace ipclab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct LogF {
  double log_f;  // log(1 - f(1 - y))
  double eps;    // y F'(y) / F(y)
};

LogF log_fbar(const OffspringSpec& spec, double log_y) {
  if (spec.family() == Family::sibuya) return {spec.alpha() * log_y, spec.alpha()};
  if (spec.family() == Family::discrete_pareto) {
    const double a = spec.alpha();
    if (a < 1.0 && (1.0 - a) * log_y < -40.0) return {std::lgamma(1.0 - a) + a * log_y, a};
    if (a == 1.0 && log_y < -700.0) return {log_y + std::log(-log_y), 1.0};
  }
  const double y = std::min(1.0, std::exp(log_y));
  const auto c = gf_complement(spec, y, false);
  if (!(c.fbar > 0.0)) return {std::log(mean(spec)) + log_y, 1.0};
  return {std::log(c.fbar), y * c.f1 / c.fbar};
}

struct Hermite {
  double v, d;  // value and derivative in tau
};

Hermite hermite(double t0, double t1, double y0, double y1, double m0, double m1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double v = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * y1 +
                   (s3 - s2) * h * m1;
  const double d = ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * m0 + (-6 * s2 + 6 * s) * y1 +
                    (3 * s2 - 2 * s) * h * m1) /
                   h;
  return {v, d};
}

}  // namespace

FixedPoint solve_fixed_point(const OffspringSpec& spec, double p, double log_theta_guess) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("solve_theta: p outside [0,1]");
  FixedPoint out;
  if (p <= critical_probability(spec) || p == 0.0) {
    out.log_theta = kNegInf;
    return out;
  }
  const double logp = std::log(p);
  auto H = [&](double t, double& dh, double& eps) {
    const LogF lf = log_fbar(spec, logp + t);
    eps = lf.eps;
    dh = 1.0 - lf.eps;
    return t - lf.log_f;
  };
  double dh, eps;
  double t = 0.0;
  double h = H(t, dh, eps);
  if (h <= 0.0) {
    out.log_theta = 0.0;
    out.stay = eps;
    return out;
  }
  double hi = 0.0, lo = kNegInf;
  if (log_theta_guess < 0.0 && std::isfinite(log_theta_guess)) {
    double dg, eg;
    const double hg = H(log_theta_guess, dg, eg);
    if (hg > 0.0) {
      hi = log_theta_guess;
    } else {
      lo = log_theta_guess;
    }
    t = log_theta_guess;
    h = hg;
    dh = dg;
    eps = eg;
    if (hg == 0.0) return {t, eps, 0};
  }
  for (int it = 1; it <= 400; ++it) {
    double tn = dh > 1e-300 ? t - h / dh : kNegInf;
    if (lo == kNegInf) {
      if (!std::isfinite(tn)) tn = t - std::max(1.0, std::abs(t));
    } else if (!(tn > lo && tn < hi)) {
      tn = 0.5 * (lo + hi);
    }
    double dhn, epsn;
    const double hn = H(tn, dhn, epsn);
    if (hn > 0.0)
      hi = tn;
    else
      lo = tn;
    const bool done = std::abs(tn - t) <= 1e-15 * std::max(1.0, std::abs(tn)) || std::abs(hn) < 1e-15 ||
                      (lo != kNegInf && hi - lo <= 4e-16 * std::max(1.0, std::abs(tn)));
    t = tn;
    h = hn;
    dh = dhn;
    eps = epsn;
    if (done) {
      out.log_theta = t;
      out.stay = eps;
      out.iterations = it;
      return out;
    }
  }
  throw SolverError("solve_theta did not converge for " + spec.label(), h);
}

double solve_theta(const OffspringSpec& spec, double p) {
  const FixedPoint fp = solve_fixed_point(spec, p);
  return fp.log_theta == kNegInf ? 0.0 : std::exp(fp.log_theta);
}

// ---------------------------------------------------------------------------

PercolationCurve::PercolationCurve(OffspringSpec spec, CurveOptions opt)
    : spec_(std::move(spec)), opt_(opt), pc_(critical_probability(spec_)) {
  const double range_hi = 1.0 - pc_;
  if (!(range_hi > 0.0)) throw ConfigError("no supercritical regime for " + spec_.label());
  if (opt_.points_per_decade < 2) throw ConfigError("curve needs at least 2 points per decade");

  double delta_lo;
  if (pc_ > 0.0) {
    delta_lo = 1e-9 * range_hi;
  } else {
    const double a = spec_.alpha();
    delta_lo = a < 0.95 ? std::pow(1e-280, 1.0 - a) : 1e-12;
    for (int guard = 0; guard < 400; ++guard) {
      const auto fp = solve_fixed_point(spec_, delta_lo);
      if (std::log(delta_lo) + fp.log_theta >= std::log(1e-285)) break;
      delta_lo *= 10.0;
    }
  }
  const double t_lo = std::log(delta_lo), t_hi = std::log(range_hi);
  const int n = std::max(2, static_cast<int>(std::ceil((t_hi - t_lo) / std::log(10.0) * opt_.points_per_decade)) + 1);

  // node abscissae are taken from the representable p so that tau and p agree exactly
  auto make_node = [&](double tau, double guess) {
    const double p = tau >= t_hi ? 1.0 : pc_ + std::exp(tau);
    const Eval e = exact_at(p, guess);
    return Node{tau_of(p), e.log_theta, e.slope, e.stay, e.stay_slope};
  };

  std::vector<Node> base;
  base.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double tau = i == n - 1 ? t_hi : t_lo + (t_hi - t_lo) * i / (n - 1);
    double guess = 1.0;
    if (!base.empty()) {
      const Node& b = base.back();
      guess = std::min(-1e-300, b.log_theta + b.slope * (tau - b.tau));
    }
    base.push_back(make_node(tau, guess));
  }

  // refine cells whose midpoint misses the exact value
  std::vector<Node> out;
  out.push_back(base.front());
  const double base_width = (t_hi - t_lo) / (n - 1);
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    std::vector<Node> stack{base[i + 1]};
    Node left = base[i];
    while (!stack.empty()) {
      const Node right = stack.back();
      bool ok = right.tau - left.tau < base_width / 256.0;
      Node m{};
      if (!ok) {
        const double mid = 0.5 * (left.tau + right.tau);
        const Hermite guess =
            hermite(left.tau, right.tau, left.log_theta, right.log_theta, left.slope, right.slope, mid);
        m = make_node(mid, std::min(-1e-300, guess.v));
        const Hermite hv = hermite(left.tau, right.tau, left.log_theta, right.log_theta, left.slope, right.slope, m.tau);
        const Hermite hs = hermite(left.tau, right.tau, left.stay, right.stay, left.stay_slope, right.stay_slope, m.tau);
        // conditioning floor: the root is ill-posed by 1/(1 - stay), and p carries
        // one rounding error relative to p_c
        const double floor =
            4e-16 * (1.0 / (1.0 - m.stay) + (pc_ / std::exp(m.tau)) * std::max(1.0, m.slope));
        ok = std::abs(hv.v - m.log_theta) <= std::max(opt_.max_log_error, floor) &&
             std::abs(hs.v - m.stay) <= 1e-9;
      }
      if (ok) {
        out.push_back(right);
        left = right;
        stack.pop_back();
      } else {
        stack.push_back(m);
      }
    }
  }
  nodes_ = std::move(out);
}

PercolationCurve::Eval PercolationCurve::exact_at(double p, double guess) const {
  const FixedPoint fp = solve_fixed_point(spec_, p, guess);
  const double delta = p - pc_;
  const double slope = (delta / p) * fp.stay / (1.0 - fp.stay);
  double stay_slope = 0.0;
  if (spec_.family() != Family::sibuya && fp.log_theta != kNegInf) {
    // d stay/dp = (stay/p) (1 - r (1 + p theta'/theta)), r = y f''/f' at y = p theta
    const double log_y = std::log(p) + fp.log_theta;
    double r = 0.0;
    const double a = spec_.alpha();
    if (spec_.family() == Family::discrete_pareto && a < 1.0 && (1.0 - a) * log_y < -40.0) {
      r = 1.0 - a;
    } else {
      const double y = std::min(1.0, std::exp(log_y));
      const auto c = gf_complement(spec_, y);
      r = y * (c.f2 / c.f1);
    }
    stay_slope = delta * (fp.stay / p) * (1.0 - r * (1.0 + p * slope / delta));
  }
  return {fp.log_theta, slope, fp.stay, stay_slope};
}

double PercolationCurve::tau_of(double p) const { return std::log(p - pc_); }

double PercolationCurve::min_weight() const noexcept { return pc_ + std::exp(nodes_.front().tau); }

PercolationCurve::Eval PercolationCurve::eval_tau(double tau) const {
  const Node& first = nodes_.front();
  if (tau <= first.tau) return {first.log_theta + first.slope * (tau - first.tau), first.slope, first.stay};
  const Node& last = nodes_.back();
  if (tau >= last.tau) return {last.log_theta, last.slope, last.stay};
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), tau, [](double t, const Node& nd) { return t < nd.tau; });
  const Node& r = *it;
  const Node& l = *(it - 1);
  const Hermite hv = hermite(l.tau, r.tau, l.log_theta, r.log_theta, l.slope, r.slope, tau);
  const Hermite hs = hermite(l.tau, r.tau, l.stay, r.stay, l.stay_slope, r.stay_slope, tau);
  return {hv.v, hv.d, hs.v};
}

double PercolationCurve::log_theta(double p) const {
  if (p <= pc_) return kNegInf;
  if (p >= 1.0) return 0.0;
  if (opt_.exact) return solve_fixed_point(spec_, p).log_theta;
  return std::min(0.0, eval_tau(tau_of(p)).log_theta);
}

double PercolationCurve::theta(double p) const {
  const double lt = log_theta(p);
  return lt == kNegInf ? 0.0 : std::exp(lt);
}

double PercolationCurve::stay_probability(double w) const {
  if (!(w > pc_ && w <= 1.0)) throw std::domain_error("stay_probability: w outside (p_c, 1]");
  if (opt_.exact) return solve_fixed_point(spec_, w).stay;
  return eval_tau(w >= 1.0 ? nodes_.back().tau : tau_of(w)).stay;
}

double PercolationCurve::m1(double w) const { return stay_probability(w) / w; }

double PercolationCurve::elasticity(double p) const {
  const double s = stay_probability(p);
  return ((p - pc_) / p) * s / (1.0 - s);
}

double PercolationCurve::theta_prime(double p) const {
  const double s = stay_probability(p);
  return theta(p) * s / (p * (1.0 - s));
}

double PercolationCurve::inverse(double y) const {
  if (!(y >= 0.0)) throw std::domain_error("theta_inverse: y < 0");
  if (y == 0.0) return pc_;
  if (y >= 1.0) {
    if (y > 1.0 + 1e-12) throw std::domain_error("theta_inverse: y > theta(1)");
    return 1.0;
  }
  return inverse_log(std::log(y));
}

double PercolationCurve::inverse_tau(double ly) const {
  if (!(ly <= 0.0)) {
    if (ly > 1e-12) throw std::domain_error("theta_inverse: y > theta(1)");
    return nodes_.back().tau;
  }
  if (ly == kNegInf) return kNegInf;
  if (opt_.exact) {
    double lo = nodes_.front().tau - 50.0, hi = nodes_.back().tau;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (solve_fixed_point(spec_, pc_ + std::exp(mid)).log_theta < ly ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  const Node& first = nodes_.front();
  if (ly <= first.log_theta) return first.tau + (ly - first.log_theta) / first.slope;
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), ly,
                             [](const Node& nd, double v) { return nd.log_theta < v; });
  if (it == nodes_.end()) return nodes_.back().tau;
  if (it->log_theta == ly) return it->tau;
  const Node& r = *it;
  const Node& l = *(it - 1);
  double lo = l.tau, hi = r.tau;
  double t = l.tau + (ly - l.log_theta) / (r.log_theta - l.log_theta) * (r.tau - l.tau);
  for (int iter = 0; iter < 100; ++iter) {
    const Hermite hv = hermite(l.tau, r.tau, l.log_theta, r.log_theta, l.slope, r.slope, t);
    const double g = hv.v - ly;
    if (g > 0)
      hi = t;
    else
      lo = t;
    double tn = hv.d > 0 ? t - g / hv.d : 0.5 * (lo + hi);
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    if (std::abs(tn - t) <= 1e-15 * std::max(1.0, std::abs(t)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(t))) {
      t = tn;
      break;
    }
    t = tn;
  }
  // where theta is flat in p the interpolation error is amplified; finish with exact Newton steps
  const double d = hermite(l.tau, r.tau, l.log_theta, r.log_theta, l.slope, r.slope, t).d;
  if (!(opt_.max_log_error / d < 1e-10 * std::exp(-t))) {
    double guess = ly;
    for (int iter = 0; iter < 8; ++iter) {
      const double p = std::min(1.0, pc_ + std::exp(t));
      const Eval e = exact_at(p, guess);
      guess = e.log_theta;
      if (!(e.slope > 0.0)) break;
      const double step = (e.log_theta - ly) / e.slope;
      t = std::min(nodes_.back().tau, t - step);
      if (std::abs(step) * std::exp(t) < 1e-13) break;
    }
  }
  return std::min(nodes_.back().tau, t);
}

double PercolationCurve::inverse_log(double ly) const {
  const double t = inverse_tau(ly);
  if (t == kNegInf) return pc_;
  if (t >= nodes_.back().tau) return 1.0;
  return std::min(1.0, pc_ + std::exp(t));
}

double PercolationCurve::log_theta_tau(double tau) const {
  if (tau >= nodes_.back().tau) return 0.0;
  if (opt_.exact) return solve_fixed_point(spec_, pc_ + std::exp(tau)).log_theta;
  return std::min(0.0, eval_tau(tau).log_theta);
}

double PercolationCurve::stay_tau(double tau) const {
  if (tau >= nodes_.back().tau) tau = nodes_.back().tau;
  if (opt_.exact) return solve_fixed_point(spec_, std::min(1.0, pc_ + std::exp(tau))).stay;
  return eval_tau(tau).stay;
}

double theta_prime(const PercolationCurve& curve, double p) {
  const double pc = curve.p_c();
  if (!(p > pc && p < 1.0)) throw std::domain_error("theta_prime: p outside (p_c, 1)");
  const auto& spec = curve.spec();
  const double th = solve_theta(spec, p);
  const double y = p * th;
  const double f1 = gf_complement(spec, y, false).f1;
  const double denom = 1.0 - p * f1;
  if (std::abs(denom) > 1e-8 && std::isfinite(f1)) return th * f1 / denom;
  // central differences with one Richardson step
  const double h = std::min(1e-6, 0.5 * std::min(p - pc, 1.0 - p));
  auto D = [&](double hh) { return (solve_theta(spec, p + hh) - solve_theta(spec, p - hh)) / (2.0 * hh); };
  return (4.0 * D(h / 2.0) - D(h)) / 3.0;
}

double theta_inverse(const PercolationCurve& curve, double y) { return curve.inverse(y); }

TiltedMoments tilted_moments(const OffspringSpec& spec, double w, double theta) {
  if (!(w > 0.0 && w <= 1.0) || !(theta >= 0.0 && theta <= 1.0))
    throw std::domain_error("tilted_moments: w or theta out of range");
  const double u = w * theta;
  const auto c = gf_complement(spec, u);
  TiltedMoments m{c.f1, c.f1 + (1.0 - u) * c.f2};
  if (!std::isfinite(m.m1) || !std::isfinite(m.m2)) throw DivergentMoment("tilted moments diverge at s = 1");
  return m;
}

ScalingFit check_theta_scaling(const OffspringSpec& spec, ScalingGrid grid) {
  const double pc = critical_probability(spec);
  std::vector<double> xs, ys;
  const int n = grid.decades * grid.points_per_decade;
  for (int j = 0; j <= n; ++j) {
    const double delta = grid.delta_hi * std::pow(10.0, -static_cast<double>(j) / grid.points_per_decade);
    const double p = pc + delta;
    if (!(p > pc && p <= 1.0)) continue;
    const auto fp = solve_fixed_point(spec, p);
    if (!std::isfinite(fp.log_theta)) continue;
    xs.push_back(std::log(delta));
    ys.push_back(fp.log_theta);
  }
  if (xs.size() < 5) throw std::domain_error("check_theta_scaling: fewer than 5 usable grid points");
  const LinearFit f = linear_fit(xs, ys);
  return {f.slope, f.intercept, f.r2, static_cast<int>(xs.size())};
}

}  // namespace ipclab
