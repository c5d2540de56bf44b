#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ipclab {

/// Philox4x32-10 counter-based generator.
/// Key = master seed (64 bit), counter = (block index, stream id).
/// Distinct stream ids give non-overlapping sequences by construction.
class Philox {
 public:
  using result_type = std::uint64_t;

  Philox(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  /// Number of 64-bit words consumed so far.
  std::uint64_t position() const noexcept { return block_ * 2 - remaining_; }

  /// Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int remaining_ = 0;
};

/// Stream ids above this bit are reserved for auxiliary (non-replication) draws.
inline constexpr std::uint64_t kAuxStreamBase = std::uint64_t{1} << 62;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Philox& g) noexcept {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1); never returns 0 or 1.
inline double uniform_open(Philox& g) noexcept {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard exponential variate.
double exponential(Philox& g);
/// Standard normal variate (polar method, no cached state).
double normal(Philox& g);
/// Gamma(shape, 1) variate; valid for any shape > 0.
double gamma(Philox& g, double shape);
/// log of a Gamma(shape, 1) variate, accurate when shape is tiny.
double log_gamma_variate(Philox& g, double shape);
/// Poisson(mean) variate as double; exact below 1e12, Gaussian beyond.
double poisson(Philox& g, double mean);
/// Binomial(n, p) for real-valued n (integer-valued in practice).
/// Exact for n <= 1e7; matched Poisson or Gaussian approximation above.
/// `approx` is set when an approximation was used.
double binomial(Philox& g, double n, double p, bool* approx = nullptr);

}  // namespace ipclab
