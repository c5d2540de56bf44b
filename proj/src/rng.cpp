#include "ipclab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ipclab {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}
}  // namespace

std::array<std::uint32_t, 4> Philox::block(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) noexcept {
  for (int r = 0; r < 10; ++r) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

Philox::Philox(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

void Philox::refill() noexcept {
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  const auto out = block(ctr, key);
  buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  ++block_;
  remaining_ = 2;
}

Philox::result_type Philox::operator()() noexcept {
  if (remaining_ == 0) refill();
  return buf_[2 - remaining_--];
}

double exponential(Philox& g) { return -std::log(uniform_open(g)); }

double normal(Philox& g) {
  for (;;) {
    const double u = 2.0 * uniform01(g) - 1.0;
    const double v = 2.0 * uniform01(g) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

namespace {
// Marsaglia-Tsang, shape >= 1
double gamma_mt(Philox& g, double a) {
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal(g);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open(g);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}
}  // namespace

double gamma(Philox& g, double shape) {
  if (shape >= 1.0) return gamma_mt(g, shape);
  return std::exp(log_gamma_variate(g, shape));
}

double log_gamma_variate(Philox& g, double shape) {
  if (shape >= 1.0) return std::log(gamma_mt(g, shape));
  const double base = gamma_mt(g, shape + 1.0);
  return std::log(base) + std::log(uniform_open(g)) / shape;
}

double poisson(Philox& g, double mean) {
  if (!(mean > 0.0)) return 0.0;
  if (mean < 1e12) {
    std::poisson_distribution<long long> d(mean);
    return static_cast<double>(d(g));
  }
  return std::max(0.0, std::round(mean + std::sqrt(mean) * normal(g)));
}

double binomial(Philox& g, double n, double p, bool* approx) {
  if (!(n > 0.0) || !(p > 0.0)) return 0.0;
  if (p >= 1.0) return n;
  if (n <= 1e7) {
    std::binomial_distribution<long long> d(static_cast<long long>(n), p);
    return static_cast<double>(d(g));
  }
  if (approx) *approx = true;
  const double mean = n * p;
  const double var = mean * (1.0 - p);
  double x;
  if (var < 100.0) {
    x = p < 0.5 ? poisson(g, mean) : n - poisson(g, n * (1.0 - p));
  } else {
    x = std::round(mean + std::sqrt(var) * normal(g));
  }
  return std::clamp(x, 0.0, n);
}

}  // namespace ipclab
