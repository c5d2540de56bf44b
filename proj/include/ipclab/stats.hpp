#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ipclab {

/// Mergeable single-pass moment accumulator (Chan et al. update).
class RunningMoments {
 public:
  void add(double x) noexcept;
  void merge(const RunningMoments& o) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two points.
  double variance() const noexcept;
  double se() const noexcept;
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

RunningMoments moments_of(std::span<const double> xs);

/// One-sample Kolmogorov-Smirnov distance of `xs` against a continuous CDF.
double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance; ties are handled exactly.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic critical coefficient c(level) = sqrt(-ln(level/2)/2).
double ks_coefficient(double level);
/// One-sample critical distance at significance `level` (e.g. 0.01).
double ks_one_sample_threshold(std::size_t n, double level = 0.01);
/// Two-sample critical distance at significance `level`.
double ks_two_sample_threshold(std::size_t n, std::size_t m, double level = 0.01);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Empirical quantile (type 7, linear interpolation) of unsorted data.
double quantile(std::vector<double> xs, double q);

}  // namespace ipclab

namespace ipclab {
/// Kolmogorov-Smirnov distance for integer-valued data against a step CDF
/// F(x) = P(X <= x); the supremum is taken over support points only.
double ks_discrete(std::vector<double> xs, const std::function<double(double)>& cdf);
}  // namespace ipclab
