#include "ipclab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ipclab/errors.hpp"
#include "ipclab/io.hpp"
#include "ipclab/stats.hpp"

namespace ipclab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double weight_of(const PercolationCurve& curve, double tau) {
  if (tau >= curve.tau_max()) return 1.0;
  return std::min(1.0, curve.p_c() + std::exp(tau));
}
}  // namespace

double sample_w0_tau(const PercolationCurve& curve, Philox& rng) {
  return curve.inverse_tau(std::log(uniform_open(rng)));
}

double sample_w0(const PercolationCurve& curve, Philox& rng) { return weight_of(curve, sample_w0_tau(curve, rng)); }

double jump_probability_tau(const PercolationCurve& curve, double tau) {
  const double q = 1.0 - curve.stay_tau(tau);
  if (!(q >= -1e-9 && q <= 1.0 + 1e-9)) {
    throw ModelError("jump probability " + std::to_string(q) + " outside [0,1] for " + curve.spec().label() +
                     " at log(w - p_c) = " + std::to_string(tau));
  }
  return std::clamp(q, 0.0, 1.0);
}

StepResult step_tau(const PercolationCurve& curve, double tau, Philox& rng) {
  const double q = jump_probability_tau(curve, tau);
  if (!(uniform01(rng) < q)) return {tau, false};
  // jump law: P(W_{k+1} <= u | jump) = theta(u) / theta(w)
  const double ly = std::log(uniform_open(rng)) + curve.log_theta_tau(tau);
  return {std::min(tau, curve.inverse_tau(ly)), true};
}

WeightStep step(const PercolationCurve& curve, double w, Philox& rng) {
  if (!(w > curve.p_c() && w <= 1.0)) throw std::domain_error("step: w outside (p_c, 1]");
  const double tau = w >= 1.0 ? curve.tau_max() : curve.tau_of(w);
  const StepResult r = step_tau(curve, tau, rng);
  return {r.jumped ? std::min(w, weight_of(curve, r.tau)) : w, r.jumped};
}

double sample_beta(double w_prev, double w_next, bool jumped, BetaConvention convention, Philox& rng) {
  const bool at_max = convention == BetaConvention::complement ? jumped : !jumped;
  if (at_max) return w_prev;
  // stays are the only non-jump case, so w_next = w_prev there
  const double top = convention == BetaConvention::complement ? w_next : w_prev;
  return top * uniform01(rng);
}

ChainPath simulate_chain(const PercolationCurve& curve, std::size_t K, BetaConvention convention, Philox& rng) {
  ChainPath path;
  path.p_c = curve.p_c();
  path.beta_convention = convention;
  path.w.reserve(K + 1);
  path.tau.reserve(K + 1);
  double tau = sample_w0_tau(curve, rng);
  double w = weight_of(curve, tau);
  path.tau.push_back(tau);
  path.w.push_back(w);
  for (std::size_t k = 0; k < K; ++k) {
    const StepResult r = step_tau(curve, tau, rng);
    const double wn = r.jumped ? std::min(w, weight_of(curve, r.tau)) : w;
    path.beta.push_back(sample_beta(w, wn, r.jumped, convention, rng));
    path.jumped.push_back(r.jumped);
    tau = r.tau;
    w = wn;
    path.tau.push_back(tau);
    path.w.push_back(w);
  }
  return path;
}

double sample_log_ratio_factor(double alpha, Philox& rng) {
  if (uniform01(rng) < alpha) return 0.0;
  return (1.0 - alpha) / alpha * std::log(uniform_open(rng));
}

ChainPath sample_product_chain(double alpha, std::size_t k, Philox& rng, BetaConvention convention) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("sample_product_chain: alpha outside (0,1)");
  ChainPath path;
  path.beta_convention = convention;
  double lw = (1.0 - alpha) / alpha * std::log(uniform_open(rng));
  path.tau.push_back(lw);
  path.w.push_back(std::exp(lw));
  for (std::size_t i = 0; i < k; ++i) {
    const double lp = sample_log_ratio_factor(alpha, rng);
    const bool jumped = lp < 0.0;
    const double w_prev = path.w.back();
    lw += lp;
    const double w = std::min(w_prev, std::exp(lw));
    path.beta.push_back(sample_beta(w_prev, w, jumped, convention, rng));
    path.jumped.push_back(jumped);
    path.tau.push_back(lw);
    path.w.push_back(w);
  }
  return path;
}

double check_ratio_limit(const PercolationCurve& curve, std::size_t k, std::size_t lag, std::size_t n, Philox& rng) {
  if (lag > k) throw std::domain_error("check_ratio_limit: lag > k");
  if (curve.spec().family() != Family::sibuya) throw std::domain_error("check_ratio_limit: sibuya specs only");
  if (lag == 0) return 0.0;
  const double alpha = curve.spec().alpha();
  std::vector<double> chain_ratio(n), product(n);
  for (std::size_t r = 0; r < n; ++r) {
    double tau = sample_w0_tau(curve, rng);
    double back = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == k - lag) back = tau;
      tau = step_tau(curve, tau, rng).tau;
    }
    chain_ratio[r] = std::exp(tau - back);
  }
  for (std::size_t r = 0; r < n; ++r) {
    double lp = 0.0;
    for (std::size_t j = 0; j < lag; ++j) lp += sample_log_ratio_factor(alpha, rng);
    product[r] = std::exp(lp);
  }
  return ks_two_sample(std::move(chain_ratio), std::move(product));
}

DecayRate check_exponential_bounds(const ChainPath& path) {
  DecayRate out;
  const std::size_t K = path.tau.size();
  if (path.p_c > 0.0 || K < 21) return out;
  std::vector<double> xs, ys;
  for (std::size_t k = K / 2; k < K; ++k) {
    xs.push_back(static_cast<double>(k));
    ys.push_back(path.tau[k]);
  }
  const LinearFit fit = linear_fit(xs, ys);
  out.applicable = true;
  out.rate = fit.slope;
  out.r2 = fit.r2;
  out.negative_and_finite = std::isfinite(fit.slope) && fit.slope < 0.0;
  return out;
}

std::string check_chain_invariants(const ChainPath& path) {
  double beta_sum = 0.0;
  for (std::size_t k = 0; k < path.w.size(); ++k) {
    if (k > 0 && !(path.w[k] <= path.w[k - 1])) return "W increased at k=" + std::to_string(k);
    if (path.p_c > 0.0 && !(path.w[k] > path.p_c)) return "W_k <= p_c at k=" + std::to_string(k);
  }
  for (std::size_t k = 1; k <= path.beta.size(); ++k) {
    const double b = path.beta[k - 1];
    if (!(b >= 0.0 && b <= path.w[k - 1])) return "beta_k > W_{k-1} at k=" + std::to_string(k);
    beta_sum += b;
    if (!(beta_sum <= static_cast<double>(k))) return "sum of beta exceeds k at k=" + std::to_string(k);
  }
  return {};
}

void write_chain_csv(std::ostream& os, const ChainPath& path) {
  os << "k,W_k,beta_k,jumped\n";
  for (std::size_t k = 0; k < path.w.size(); ++k) {
    os << k << ',' << format_double(path.w[k]) << ',';
    if (k > 0) os << format_double(path.beta[k - 1]) << ',' << (path.jumped[k - 1] ? 1 : 0);
    else os << ',';
    os << '\n';
  }
}

}  // namespace ipclab
