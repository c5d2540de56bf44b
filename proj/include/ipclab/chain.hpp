#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ipclab/conventions.hpp"
#include "ipclab/percolation.hpp"
#include "ipclab/rng.hpp"

namespace ipclab {

/// One realisation of the future-maximum chain W_0..W_K and the backbone
/// weights beta_1..beta_K. `tau[k] = log(W_k - p_c)` is kept alongside W_k
/// because W_k - p_c leaves double range after a few hundred jumps when p_c = 0.
struct ChainPath {
  double p_c = 0.0;
  std::vector<double> w;
  std::vector<double> tau;
  std::vector<double> beta;  ///< beta[k-1] is beta_k
  std::vector<bool> jumped;  ///< jumped[k-1]: W_k < W_{k-1}
  BetaConvention beta_convention = BetaConvention::complement;

  std::size_t steps() const noexcept { return beta.size(); }
};

struct StepResult {
  double tau = 0.0;
  bool jumped = false;
};

/// W_0 with CDF theta(p); returned as tau = log(W_0 - p_c).
double sample_w0_tau(const PercolationCurve& curve, Philox& rng);
double sample_w0(const PercolationCurve& curve, Philox& rng);

/// Jump probability 1 - w f'(1 - w theta(w)) = m1 theta / theta'. Throws
/// ModelError when it leaves [0, 1] by more than 1e-9.
double jump_probability_tau(const PercolationCurve& curve, double tau);

/// One transition of the chain in tau coordinates.
StepResult step_tau(const PercolationCurve& curve, double tau, Philox& rng);

struct WeightStep {
  double w = 0.0;
  bool jumped = false;
};
WeightStep step(const PercolationCurve& curve, double w, Philox& rng);

/// beta_{k+1} given the transition W_k = w_prev -> W_{k+1} = w_next.
double sample_beta(double w_prev, double w_next, bool jumped, BetaConvention convention, Philox& rng);

/// K transitions starting from a fresh W_0.
ChainPath simulate_chain(const PercolationCurve& curve, std::size_t K, BetaConvention convention, Philox& rng);

/// One factor of the product representation: 1 with probability alpha,
/// otherwise U^{(1-alpha)/alpha}. Returned as log P.
double sample_log_ratio_factor(double alpha, Philox& rng);

/// Sibuya-only chain built from W_0 = V^{(1-alpha)/alpha} and i.i.d. factors.
ChainPath sample_product_chain(double alpha, std::size_t k, Philox& rng,
                               BetaConvention convention = BetaConvention::complement);

/// Two-sample KS distance between W_k / W_{k-lag} from `n` step() chains and
/// a product of `lag` independent factors (n draws). Sibuya specs only.
double check_ratio_limit(const PercolationCurve& curve, std::size_t k, std::size_t lag, std::size_t n, Philox& rng);

struct DecayRate {
  bool applicable = false;  ///< false when p_c > 0 or the path is too short
  double rate = 0.0;        ///< fitted slope of log W_k against k over the second half
  double r2 = 0.0;
  bool negative_and_finite = false;
};
DecayRate check_exponential_bounds(const ChainPath& path);

/// Pathwise invariants: W non-increasing, beta_k <= W_{k-1}, sum beta <= k,
/// W_k > p_c. Returns an empty string when all hold, else a description.
std::string check_chain_invariants(const ChainPath& path);

/// CSV rows `k,W_k,beta_k,jumped` (beta and jumped empty at k = 0).
void write_chain_csv(std::ostream& os, const ChainPath& path);

}  // namespace ipclab
