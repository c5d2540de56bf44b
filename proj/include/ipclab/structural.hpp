#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ipclab/chain.hpp"
#include "ipclab/conventions.hpp"
#include "ipclab/percolation.hpp"
#include "ipclab/rng.hpp"

namespace ipclab {

struct StructuralOptions {
  Conventions conventions;
  /// Levels with more finite trees than this are aggregated (bulk mode).
  double bulk_tree_threshold = 1e4;
  /// Levels whose expected vertex count exceeds this are aggregated as well.
  double bulk_vertex_threshold = 1e7;
  /// Sums of more uniform weights than this use the matched normal law.
  double exact_weight_sum_max = 256;
  /// A single finite tree larger than this aborts with ModelError.
  double tree_vertex_cap = 1e9;
};

/// Offspring law of the finite trees at weight w: the w-percolated law
/// conditioned on extinction, with pgf g(s) = f(1 - w + w eta s) / eta.
class TreeLaw {
 public:
  TreeLaw(const PercolationCurve& curve, double tau);

  double w() const noexcept { return w_; }
  double eta() const noexcept { return eta_; }
  /// E[X~] = w f'(1 - w theta).
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return var_; }
  /// Moments of the total progeny |T| (root included).
  double progeny_mean() const noexcept { return 1.0 / (1.0 - mean_); }
  double progeny_variance() const noexcept;

  double sample(Philox& rng) const;
  /// P(X~ = k) by direct evaluation of the dual generating function's coefficients.
  double pmf(std::int64_t k) const;

 private:
  const OffspringSpec* spec_;
  double w_, log_w_, theta_, eta_, log_eta_, mean_, var_;
  std::vector<double> cdf_;  ///< tabulated law, used when eta is small
};

/// State of one backbone level at weight W_k = w.
struct LevelLaw {
  LevelLaw(const PercolationCurve& curve, double tau);

  const PercolationCurve* curve;
  double tau, w, log_theta, theta, eta;
  double u;      ///< w theta
  double m1;     ///< f'(1 - u), the tilted normaliser
  double stay;   ///< w m1
  TreeLaw tree;

  double retention(Retention r) const;
};

/// D from pmf proportional to x (1 - w theta)^{x-1} P(X = x).
/// `approx` is set when a Gaussian Poisson approximation was needed.
double sample_backbone_degree(const LevelLaw& level, Philox& rng, bool* approx = nullptr);
double sample_backbone_degree(const PercolationCurve& curve, double w, Philox& rng);

/// Binomial(n, keep) with n = D or D - 1.
double thin_degree(double D, double keep, ThinCount convention, Philox& rng, bool* approx = nullptr);

struct TreeSample {
  double vertices = 0.0;
  double edges = 0.0;
  double weight_sum = 0.0;
};

/// One conditionally finite tree; weights i.i.d. Unif[0, w]. When `weights`
/// is non-null every edge weight is drawn explicitly and appended.
TreeSample sample_finite_tree(const TreeLaw& law, TreeEdges edges, Philox& rng, const StructuralOptions& opt = {},
                              std::vector<double>* weights = nullptr);

/// Total vertices of n independent trees; `bulk` draws the excess over n from
/// a Gamma law with the exact mean and variance instead of simulating.
double sample_forest_vertices(const TreeLaw& law, double n, bool bulk, const StructuralOptions& opt, Philox& rng);

/// Sum of n i.i.d. Unif[0, w]; exact up to `exact_max` terms, matched normal above.
double sum_uniform(double n, double w, double exact_max, Philox& rng);

struct LevelSample {
  std::size_t k = 0;
  double w = 0.0;
  double D = 0.0;
  double D_hat = 0.0;
  double H = 0.0;      ///< vertices added at this level, backbone vertex included
  double edges = 0.0;  ///< weighted forest edges at this level
  double B = 0.0;      ///< forest edge weight at this level
  bool approx = false;
};

LevelSample sample_level(const LevelLaw& level, const StructuralOptions& opt, Philox& rng);
LevelSample sample_level(const PercolationCurve& curve, double tau, const StructuralOptions& opt, Philox& rng);

struct ClusterPath {
  ChainPath chain;
  std::vector<LevelSample> levels;
  std::vector<double> M;  ///< M[k] = sum_{i<=k} H_i
  std::vector<double> C;  ///< C[k] = sum_{i<=k} B_i (+ beta_1..beta_k)
  Conventions conventions;
};

ClusterPath simulate_cluster(const PercolationCurve& curve, std::size_t K, const StructuralOptions& opt, Philox& rng);

/// Levels built on a given chain path (conditional sampling given (W_k)).
ClusterPath simulate_cluster_on(const PercolationCurve& curve, const ChainPath& chain, const StructuralOptions& opt,
                                Philox& rng);

/// C_k < M_k, C and M non-decreasing, chain invariants. Empty when all hold.
std::string check_cluster_invariants(const ClusterPath& path);

/// CSV header for write_cluster_rows.
std::string cluster_csv_header();
void write_cluster_rows(std::ostream& os, std::size_t rep, const ClusterPath& path);

}  // namespace ipclab
