#pragma once

#include <vector>

#include "ipclab/offspring.hpp"

namespace ipclab {

/// Survival probability of the p-percolated tree: largest root of
/// theta = 1 - f(1 - p theta). Returns 0 for p <= p_c.
double solve_theta(const OffspringSpec& spec, double p);

/// Solution of the fixed point together with the elasticity of
/// F(y) = 1 - f(1-y) at y = p theta. The elasticity equals p f'(1 - p theta).
struct FixedPoint {
  double log_theta = -1e308;
  double stay = 0.0;  ///< p f'(1 - p theta)
  int iterations = 0;
};
/// `log_theta_guess` (if finite) seeds the Newton iteration.
FixedPoint solve_fixed_point(const OffspringSpec& spec, double p, double log_theta_guess = 1.0);

struct CurveOptions {
  int points_per_decade = 16;
  /// Build-time refinement target for |log theta| at cell midpoints.
  double max_log_error = 1e-10;
  /// Skip interpolation entirely and re-solve on every query.
  bool exact = false;
};

/// theta(p) on a grid geometric in p - p_c, interpolated by cubic Hermite
/// segments in (log(p - p_c), log theta) with exact node slopes.
class PercolationCurve {
 public:
  explicit PercolationCurve(OffspringSpec spec, CurveOptions opt = {});

  const OffspringSpec& spec() const noexcept { return spec_; }
  double p_c() const noexcept { return pc_; }
  /// Smallest weight resolved by the grid; below it theta follows the local power law.
  double min_weight() const noexcept;

  double theta(double p) const;
  double log_theta(double p) const;
  /// d log theta / d log(p - p_c).
  double elasticity(double p) const;
  double theta_prime(double p) const;
  /// P(W_{k+1} = W_k | W_k = w) = w f'(1 - w theta(w)).
  double stay_probability(double w) const;
  /// f'(1 - w theta(w)).
  double m1(double w) const;
  double inverse(double y) const;
  /// Inverse taking log y; usable where y itself underflows.
  double inverse_log(double log_y) const;

  /// Accessors in tau = log(p - p_c), which stays finite where p - p_c underflows.
  double tau_of(double p) const;
  double log_theta_tau(double tau) const;
  double stay_tau(double tau) const;
  /// tau with log theta(p_c + e^tau) = log_y; -inf for log_y = -inf.
  double inverse_tau(double log_y) const;
  double tau_max() const noexcept { return nodes_.back().tau; }

  struct Node {
    double tau;        ///< log(p - p_c)
    double log_theta;  ///< log theta
    double slope;      ///< d log theta / d tau
    double stay;       ///< p f'(1 - p theta)
    double stay_slope; ///< d stay / d tau
  };
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const CurveOptions& options() const noexcept { return opt_; }

 private:
  struct Eval {
    double log_theta;
    double slope;
    double stay;
    double stay_slope = 0.0;
  };
  Eval eval_tau(double tau) const;
  Eval exact_at(double p, double guess = 1.0) const;

  OffspringSpec spec_;
  CurveOptions opt_;
  double pc_;
  std::vector<Node> nodes_;
};

double theta_prime(const PercolationCurve& curve, double p);
double theta_inverse(const PercolationCurve& curve, double y);

struct TiltedMoments {
  double m1 = 0.0;  ///< E[X s^(X-1)]
  double m2 = 0.0;  ///< E[X^2 s^(X-1)]
};
/// Moments at s = 1 - w theta. Throws DivergentMoment when infinite.
TiltedMoments tilted_moments(const OffspringSpec& spec, double w, double theta);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};
struct ScalingGrid {
  /// Largest distance from criticality on the grid.
  double delta_hi = 1e-3;
  int decades = 4;
  int points_per_decade = 40;
};
/// Log-log slope of theta against p - p_c (p when p_c = 0) near criticality.
ScalingFit check_theta_scaling(const OffspringSpec& spec, ScalingGrid grid = {});

}  // namespace ipclab
