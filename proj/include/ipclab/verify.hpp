#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ipclab/conventions.hpp"

namespace ipclab {

struct Check {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::string target;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  double seconds = 0.0;

  bool pass() const;
  /// Aligned text table, one row per check, then the notes.
  std::string table() const;
  std::string json() const;
};

/// Zero or empty fields fall back to each battery's defaults.
struct VerifyOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::size_t reps = 0;
  std::size_t k_max = 0;
  std::size_t steps = 0;
  std::vector<double> alphas;
  Conventions conventions;
  double tol_theta = 1e-10;
  double tol_ratio = 0.05;
  double tol_ks = 0.05;
  double tol_plateau = 2e-3;
  double tol_ratio_limit = 0.0087;
};

/// |solve_theta - p^{alpha/(1-alpha)}| on p = 0.01..0.99.
VerifyReport verify_theta(const VerifyOptions& opt);
/// Log-log slopes of theta near criticality: 1 (alpha=3), 2 (alpha=1.5), 1/3 (alpha=0.25).
VerifyReport verify_theta_exponents(const VerifyOptions& opt);
/// Stay frequency and jump-factor law of the weight chain.
VerifyReport verify_chain_law(const VerifyOptions& opt);
/// KS between W_50/W_49 and one jump factor.
VerifyReport verify_ratio_limit(const VerifyOptions& opt);
/// Monte Carlo E[C_k], k <= K, against oracle partial sums; resolves the forest factor.
VerifyReport verify_example(const VerifyOptions& opt);
VerifyReport verify_instance1(const VerifyOptions& opt);
VerifyReport verify_instance2(const VerifyOptions& opt);
VerifyReport verify_instance3(const VerifyOptions& opt);
/// Post-burn-in maximum invaded weight against p_c.
VerifyReport verify_soc(const VerifyOptions& opt);
/// Direct invasion C_3 against the structural sampler (discrete Pareto alpha=3).
VerifyReport verify_crosscheck(const VerifyOptions& opt);
/// Pathwise invariants, pmf normalisations and byte-level determinism.
VerifyReport verify_invariants(const VerifyOptions& opt);

/// Dispatch by name; throws ConfigError for an unknown target.
VerifyReport run_verify(const std::string& target, const VerifyOptions& opt);
std::vector<std::string> verify_targets();

}  // namespace ipclab
