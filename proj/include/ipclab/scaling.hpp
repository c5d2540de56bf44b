#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipclab/io.hpp"
#include "ipclab/offspring.hpp"
#include "ipclab/stats.hpp"
#include "ipclab/structural.hpp"

namespace ipclab {

/// Regimes of the tail exponent: first alpha > 1 (alpha != 2), second (1/2, 1), third (0, 1/2).
enum class Instance { first, second, third };

std::string to_string(Instance i);
Instance instance_from_string(const std::string& s);
/// Throws ConfigError when alpha sits on a boundary (1/2, 1, 2) or the spec has no tail exponent.
Instance instance_for(const OffspringSpec& spec);

struct EnsembleConfig {
  OffspringSpec spec = OffspringSpec::sibuya(0.25);
  std::size_t K = 10;
  std::size_t N = 1000;
  StructuralOptions options;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  /// Keep every path's (log W_k, C_k, M_k) for distributional tests.
  bool keep_paths = true;
  /// Keep per-replication CSV rows (large).
  bool keep_rows = false;

  /// N >= 100, K >= 1, threads >= 1. Throws ConfigError.
  void validate() const;
};

struct KStats {
  RunningMoments C, M, ratio, W;
};

struct RunSummary {
  std::vector<KStats> per_k;
  std::size_t N = 0;
  std::size_t approx_levels = 0;  ///< levels that used bulk or Gaussian shortcuts
  std::size_t invariant_failures = 0;
  std::string first_invariant_failure;
  /// Row-major [rep][k]; filled when keep_paths is set.
  std::vector<double> log_w, C, M;
  /// Per-replication CSV rows in replication order; filled when keep_rows is set.
  std::string rows;

  std::size_t K() const noexcept { return per_k.empty() ? 0 : per_k.size() - 1; }
  std::vector<double> column(const std::vector<double>& m, std::size_t k) const;
};

/// A replication threw; `completed` replications (a prefix in index order) are in `partial`.
struct EnsembleError : std::runtime_error {
  EnsembleError(const std::string& what, RunSummary partial, std::size_t completed)
      : std::runtime_error(what), partial(std::move(partial)), completed(completed) {}
  RunSummary partial;
  std::size_t completed;
};

/// Replication r uses Philox(seed, r). Output is identical for any thread count.
RunSummary run_ensemble(const EnsembleConfig& cfg);

/// Runs body(i) for i in [0, n) on `threads` workers; rethrows the exception of the lowest index.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// Worker count from IPC_LAB_THREADS, else hardware concurrency, else 1.
unsigned default_threads();

struct RatioPoint {
  std::size_t k = 0;
  double ratio_of_means = 0.0;
  double mean_ratio = 0.0;
  double se = 0.0;
};
struct RatioTest {
  std::vector<RatioPoint> points;
  double target = 0.0;  ///< p_c / 2
  double rel_error = 0.0;  ///< of mean C_K/M_K at the largest k
  double tolerance = 0.05;
  bool pass = false;
};
/// E[C_k]/E[M_k] and E[C_k/M_k] on a k grid; asserts the latter at k = K within `tolerance` of p_c/2.
RatioTest first_instance_ratio_test(const EnsembleConfig& cfg, const RunSummary& run, double tolerance = 0.05);

struct StabilityTest {
  std::size_t ell = 1;
  std::size_t k_half = 0, k_full = 0;
  double ks = 0.0;
  double threshold = 0.05;
  bool pass = false;
};
/// KS between S_k = W_k^{(2 alpha - 1)/(1 - alpha)} C_{k - ell} at k = K/2 and k = K.
StabilityTest second_instance_stability_test(const EnsembleConfig& cfg, const RunSummary& run, std::size_t ell,
                                             double threshold = 0.05);
std::vector<double> second_instance_scaled(const EnsembleConfig& cfg, const RunSummary& run, std::size_t k,
                                           std::size_t ell);

struct PlateauTest {
  std::size_t k_half = 0, k_full = 0;
  double diff = 0.0;     ///< E[C_K] - E[C_{K/2}]
  double diff_se = 0.0;  ///< paired SE of the difference
  double tolerance = 2e-3;
  double ks = 0.0;
  double ks_threshold = 0.05;
  bool pass = false;
};
PlateauTest third_instance_convergence_test(const EnsembleConfig& cfg, const RunSummary& run,
                                            double tolerance = 2e-3, double ks_threshold = 0.05);

/// log-log least squares of y on k. Throws std::domain_error for fewer than 10
/// points or non-positive values.
LinearFit fit_growth_exponent(const std::vector<double>& k, const std::vector<double>& y);

/// Rebuilds per-k statistics from per-replication rows (columns rep,k,w_k,M,C) in file order.
/// Applied to the rows written by a run, per_k_csv of the result matches the run's own.
RunSummary summarize_rows(const CsvTable& rows);

/// Summary JSON (config echo, per-k mean/variance/SE, counts).
std::string summary_json(const EnsembleConfig& cfg, const RunSummary& run, const std::string& extra_json = "{}");
/// Columns k,mean_C,var_C,se_C,mean_M,var_M,se_M,mean_ratio,se_ratio,mean_W.
std::string per_k_csv(const RunSummary& run);
/// Mean C_k, mean M_k, mean ratio and C_k quantiles against k.
std::string ensemble_svg(const EnsembleConfig& cfg, const RunSummary& run);

}  // namespace ipclab
