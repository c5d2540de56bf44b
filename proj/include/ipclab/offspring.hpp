#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ipclab/rng.hpp"

namespace ipclab {

enum class Family { sibuya, discrete_pareto, deterministic };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// Offspring law on {1, 2, ...}. Immutable; cheap to copy.
class OffspringSpec {
 public:
  static OffspringSpec sibuya(double alpha);
  static OffspringSpec discrete_pareto(double alpha);
  static OffspringSpec deterministic(std::int64_t m);

  Family family() const noexcept { return family_; }
  /// Tail exponent; 0 for deterministic laws.
  double alpha() const noexcept { return alpha_; }
  std::int64_t fixed_value() const noexcept { return m_; }
  std::string label() const;

  /// P(X = k) for k = 1..table_size(), index k-1. Discrete Pareto only.
  const std::vector<double>& pmf_table() const { return *table_; }
  static constexpr int kTableSize = 1024;

 private:
  OffspringSpec(Family f, double a, std::int64_t m);
  Family family_;
  double alpha_;
  std::int64_t m_;
  std::shared_ptr<const std::vector<double>> table_;
};

/// (f, f', f'') at a point of [0, 1].
struct GeneratingFunctionValue {
  double f = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
};

/// Values at s = 1 - u, accurate for small u:
/// fbar = 1 - f(1-u), f1 = f'(1-u), f2 = f''(1-u).
struct ComplementValue {
  double fbar = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
};

double pmf(const OffspringSpec& spec, std::int64_t k);
double survival(const OffspringSpec& spec, std::int64_t k);
GeneratingFunctionValue gf(const OffspringSpec& spec, double s);
ComplementValue gf_complement(const OffspringSpec& spec, double u, bool need_f2 = true);
/// E[X]; +inf when infinite.
double mean(const OffspringSpec& spec);
/// 1 / E[X], or 0 when the mean is infinite.
double critical_probability(const OffspringSpec& spec);

enum class SibuyaMethod {
  mixture,    ///< exact Beta-Geometric mixture
  inversion,  ///< survival recursion with asymptotic tail inversion past a cutoff
};

struct SamplerOptions {
  SibuyaMethod sibuya_method = SibuyaMethod::mixture;
  std::int64_t inversion_cutoff = 1'000'000;
};

/// Draw as a double. Integer-exact below 2^53; +inf only for astronomically
/// large draws (beyond 1e308).
double sample_real(const OffspringSpec& spec, Philox& rng, const SamplerOptions& opt = {});

using BigCount = boost::multiprecision::cpp_int;
/// Unbounded draw. Values above 2^53 carry the magnitude of the underlying real draw;
/// an infinite real draw saturates at 2^1024.
BigCount sample(const OffspringSpec& spec, Philox& rng, const SamplerOptions& opt = {});

struct SaturatedDraw {
  std::uint64_t value = 0;
  bool overflow = false;
};
/// Draw saturating at 2^64 - 1 with an overflow flag.
SaturatedDraw sample_saturating(const OffspringSpec& spec, Philox& rng, const SamplerOptions& opt = {});

/// Sibuya survival asymptote k^-alpha / Gamma(1-alpha) used beyond the inversion cutoff.
double sibuya_survival_asymptote(double alpha, double k);

}  // namespace ipclab
