#include "ipclab/offspring.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ipclab/errors.hpp"

namespace ipclab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kRecursionLimit = 100000;

double pareto_p(double a, double x) { return -std::pow(x, -a) * std::expm1(-a * std::log1p(1.0 / x)); }

enum class Kind { f, f1, f2, fbar };

double pareto_term(Kind kind, double x, double p, double L) {
  switch (kind) {
    case Kind::f: return p * std::exp(x * L);
    case Kind::f1: return x * p * std::exp((x - 1.0) * L);
    case Kind::f2: return x * (x - 1.0) * p * std::exp((x - 2.0) * L);
    case Kind::fbar: return -p * std::expm1(x * L);
  }
  return 0.0;
}

boost::math::quadrature::exp_sinh<double>& tail_integrator() {
  thread_local boost::math::quadrature::exp_sinh<double> q;
  return q;
}

// Sum over k >= 1 of the series for `kind` at log(s) = L <= 0: direct to the
// table size, Euler-Maclaurin tail beyond.
double pareto_sum(const OffspringSpec& spec, Kind kind, double L) {
  const double a = spec.alpha();
  if (L == 0.0) {
    if (kind == Kind::fbar) return 0.0;
    if (kind == Kind::f1 && a <= 1.0) return kInf;
    if (kind == Kind::f2 && a <= 2.0) return kInf;
  }
  const auto& t = spec.pmf_table();
  const int n = static_cast<int>(t.size());
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double x = k;
    if (kind != Kind::fbar && (x - 2.0) * L < -745.0) return sum;
    sum += pareto_term(kind, x, t[k - 1], L);
  }
  if (kind != Kind::fbar && (n - 2.0) * L < -740.0) return sum;
  auto phi = [&](double x) { return pareto_term(kind, x, pareto_p(a, x), L); };
  const double N = n;
  double integral = 0.0;
  if (L == 0.0) {
    integral = tail_integrator().integrate(phi, N, kInf, 1e-13);
  } else {
    // integrate in log x over unit cells until exp(x L) < e^-60
    const double X = std::max(N, 60.0 / -L);
    if (!std::isfinite(X)) throw std::domain_error("pareto series: argument too close to 1");
    auto psi = [&](double s) {
      const double x = std::exp(s);
      return phi(x) * x;
    };
    const double s0 = std::log(N);
    const double s1 = std::log(X);
    for (double lo = s0; lo < s1; lo += 1.0) {
      const double hi = std::min(lo + 1.0, s1);
      integral += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(psi, lo, hi, 4, 1e-13);
    }
    // remaining pmf mass beyond X, exact for the continuous extension
    if (kind == Kind::fbar) {
      integral += a == 1.0 ? std::log1p(1.0 / X)
                           : std::pow(X, 1.0 - a) * std::expm1((1.0 - a) * std::log1p(1.0 / X)) / (1.0 - a);
    }
  }
  const double h = 0.5;
  const double d1 = (phi(N + h) - phi(N - h)) / (2.0 * h);
  return sum + integral - 0.5 * phi(N) - d1 / 12.0;
}

double sibuya_survival_exact(double a, std::int64_t k) {
  if (k <= 0) return 1.0;
  if (k <= kRecursionLimit) {
    double s = 1.0;
    for (std::int64_t j = 1; j <= k; ++j) s *= 1.0 - a / static_cast<double>(j);
    return s;
  }
  const double kk = static_cast<double>(k);
  return boost::math::tgamma_delta_ratio(kk + 1.0 - a, a) / boost::math::tgamma(1.0 - a);
}

// Sum_{k=1}^inf k^-a for a > 1: direct sum plus Euler-Maclaurin tail
double zeta_sum(double a) {
  constexpr int n = 1000;
  double s = 0.0;
  for (int k = n; k >= 1; --k) s += std::pow(static_cast<double>(k), -a);
  const double N = n;
  s += std::pow(N, 1.0 - a) / (a - 1.0) - 0.5 * std::pow(N, -a) + a * std::pow(N, -a - 1.0) / 12.0 -
       a * (a + 1.0) * (a + 2.0) * std::pow(N, -a - 3.0) / 720.0;
  return s;
}

double sibuya_inversion(double a, double v, std::int64_t cutoff) {
  // X = min{k : S(k) < v}
  double s = 1.0;
  for (std::int64_t k = 1; k <= cutoff; ++k) {
    s *= 1.0 - a / static_cast<double>(k);
    if (s < v) return static_cast<double>(k);
  }
  const double guess = std::ceil(std::pow(v * boost::math::tgamma(1.0 - a), -1.0 / a));
  if (!(guess < 1e15)) return guess;
  auto k = std::max(static_cast<std::int64_t>(guess), cutoff + 1);
  // local correction against the exact survival
  while (k > cutoff + 1 && sibuya_survival_exact(a, k - 1) < v) --k;
  while (sibuya_survival_exact(a, k) >= v) ++k;
  return static_cast<double>(k);
}

double sibuya_mixture(double a, Philox& rng) {
  // X | p ~ Geometric(p) on {1,2,...}, p ~ Beta(a, 1-a)
  const double l1 = log_gamma_variate(rng, a);
  const double l2 = log_gamma_variate(rng, 1.0 - a);
  const double mx = std::max(l1, l2);
  const double logp = l1 - (mx + std::log(std::exp(l1 - mx) + std::exp(l2 - mx)));
  const double e = exponential(rng);
  if (logp < -30.0) return 1.0 + std::floor(std::exp(std::log(e) - logp));
  const double p = std::exp(logp);
  if (p >= 1.0) return 1.0;
  return 1.0 + std::floor(e / -std::log1p(-p));
}
}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::sibuya: return "sibuya";
    case Family::discrete_pareto: return "discrete_pareto";
    case Family::deterministic: return "deterministic";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "sibuya") return Family::sibuya;
  if (s == "discrete_pareto" || s == "pareto") return Family::discrete_pareto;
  if (s == "deterministic") return Family::deterministic;
  throw ConfigError("unknown offspring family '" + s + "'");
}

OffspringSpec::OffspringSpec(Family f, double a, std::int64_t m) : family_(f), alpha_(a), m_(m) {
  if (f == Family::discrete_pareto) {
    auto t = std::make_shared<std::vector<double>>(kTableSize);
    for (int k = 1; k <= kTableSize; ++k) (*t)[k - 1] = pareto_p(a, k);
    table_ = std::move(t);
  } else {
    table_ = std::make_shared<const std::vector<double>>();
  }
}

OffspringSpec OffspringSpec::sibuya(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("sibuya requires alpha in (0,1)");
  return OffspringSpec(Family::sibuya, alpha, 0);
}

OffspringSpec OffspringSpec::discrete_pareto(double alpha) {
  if (!(alpha > 0.0 && std::isfinite(alpha))) throw ConfigError("discrete_pareto requires alpha > 0");
  return OffspringSpec(Family::discrete_pareto, alpha, 0);
}

OffspringSpec OffspringSpec::deterministic(std::int64_t m) {
  if (m < 1) throw ConfigError("deterministic requires fixed value >= 1");
  return OffspringSpec(Family::deterministic, 0.0, m);
}

std::string OffspringSpec::label() const {
  std::ostringstream os;
  os << to_string(family_) << '(';
  if (family_ == Family::deterministic)
    os << m_;
  else
    os << "alpha=" << alpha_;
  os << ')';
  return os.str();
}

double pmf(const OffspringSpec& spec, std::int64_t k) {
  if (k <= 0) throw std::domain_error("pmf: k must be >= 1");
  switch (spec.family()) {
    case Family::deterministic: return k == spec.fixed_value() ? 1.0 : 0.0;
    case Family::discrete_pareto:
      if (k <= OffspringSpec::kTableSize) return spec.pmf_table()[k - 1];
      return pareto_p(spec.alpha(), static_cast<double>(k));
    case Family::sibuya: return sibuya_survival_exact(spec.alpha(), k - 1) * spec.alpha() / static_cast<double>(k);
  }
  return 0.0;
}

double survival(const OffspringSpec& spec, std::int64_t k) {
  if (k < 1) return 1.0;
  switch (spec.family()) {
    case Family::deterministic: return k < spec.fixed_value() ? 1.0 : 0.0;
    case Family::discrete_pareto: return std::pow(static_cast<double>(k) + 1.0, -spec.alpha());
    case Family::sibuya: return sibuya_survival_exact(spec.alpha(), k);
  }
  return 0.0;
}

double sibuya_survival_asymptote(double alpha, double k) {
  return std::pow(k, -alpha) / boost::math::tgamma(1.0 - alpha);
}

GeneratingFunctionValue gf(const OffspringSpec& spec, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("gf: s outside [0,1]");
  GeneratingFunctionValue v;
  switch (spec.family()) {
    case Family::sibuya: {
      const double a = spec.alpha(), u = 1.0 - s;
      v.f = 1.0 - std::pow(u, a);
      v.f1 = u == 0.0 ? kInf : a * std::pow(u, a - 1.0);
      v.f2 = u == 0.0 ? kInf : a * (1.0 - a) * std::pow(u, a - 2.0);
      return v;
    }
    case Family::deterministic: {
      const double m = static_cast<double>(spec.fixed_value());
      v.f = std::pow(s, m);
      v.f1 = m * std::pow(s, m - 1.0);
      v.f2 = m == 1.0 ? 0.0 : m * (m - 1.0) * std::pow(s, m - 2.0);
      return v;
    }
    case Family::discrete_pareto: {
      if (s == 0.0) {
        v.f = 0.0;
        v.f1 = pmf(spec, 1);
        v.f2 = 2.0 * pmf(spec, 2);
        return v;
      }
      const double L = std::log(s);
      v.f = s == 1.0 ? 1.0 : pareto_sum(spec, Kind::f, L);
      v.f1 = pareto_sum(spec, Kind::f1, L);
      v.f2 = pareto_sum(spec, Kind::f2, L);
      return v;
    }
  }
  return v;
}

ComplementValue gf_complement(const OffspringSpec& spec, double u, bool need_f2) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("gf_complement: u outside [0,1]");
  ComplementValue v;
  switch (spec.family()) {
    case Family::sibuya: {
      const double a = spec.alpha();
      v.fbar = std::pow(u, a);
      v.f1 = u == 0.0 ? kInf : a * std::pow(u, a - 1.0);
      v.f2 = u == 0.0 ? kInf : a * (1.0 - a) * std::pow(u, a - 2.0);
      return v;
    }
    case Family::deterministic: {
      const double m = static_cast<double>(spec.fixed_value());
      const double L = std::log1p(-u);
      v.fbar = -std::expm1(m * L);
      v.f1 = m * std::exp((m - 1.0) * L);
      v.f2 = m == 1.0 ? 0.0 : m * (m - 1.0) * std::exp((m - 2.0) * L);
      return v;
    }
    case Family::discrete_pareto: {
      if (u == 1.0) {
        const auto g = gf(spec, 0.0);
        return {1.0, g.f1, g.f2};
      }
      const double a = spec.alpha();
      if (a < 1.0 && u > 0.0 && (1.0 - a) * std::log(u) < -40.0) {
        // regular part is below double precision relative to u^a
        const double g = boost::math::tgamma(1.0 - a);
        v.fbar = g * std::pow(u, a);
        v.f1 = a * g * std::pow(u, a - 1.0);
        v.f2 = a * (1.0 - a) * g * std::pow(u, a - 2.0);
        return v;
      }
      const double L = std::log1p(-u);
      v.fbar = pareto_sum(spec, Kind::fbar, L);
      v.f1 = pareto_sum(spec, Kind::f1, L);
      v.f2 = need_f2 ? pareto_sum(spec, Kind::f2, L) : std::numeric_limits<double>::quiet_NaN();
      return v;
    }
  }
  return v;
}

double mean(const OffspringSpec& spec) {
  switch (spec.family()) {
    case Family::deterministic: return static_cast<double>(spec.fixed_value());
    case Family::sibuya: return kInf;
    case Family::discrete_pareto: return spec.alpha() > 1.0 ? zeta_sum(spec.alpha()) : kInf;
  }
  return kInf;
}

double critical_probability(const OffspringSpec& spec) {
  const double m = mean(spec);
  return std::isfinite(m) ? 1.0 / m : 0.0;
}

double sample_real(const OffspringSpec& spec, Philox& rng, const SamplerOptions& opt) {
  switch (spec.family()) {
    case Family::deterministic: return static_cast<double>(spec.fixed_value());
    case Family::discrete_pareto: {
      const double v = uniform_open(rng);
      return std::floor(std::exp(-std::log(v) / spec.alpha()));
    }
    case Family::sibuya:
      if (opt.sibuya_method == SibuyaMethod::inversion)
        return sibuya_inversion(spec.alpha(), uniform_open(rng), opt.inversion_cutoff);
      return sibuya_mixture(spec.alpha(), rng);
  }
  return 1.0;
}

BigCount sample(const OffspringSpec& spec, Philox& rng, const SamplerOptions& opt) {
  const double x = sample_real(spec, rng, opt);
  if (!std::isfinite(x)) return BigCount(1) << 1024;
  return BigCount(x);
}

SaturatedDraw sample_saturating(const OffspringSpec& spec, Philox& rng, const SamplerOptions& opt) {
  const double x = sample_real(spec, rng, opt);
  if (!(x < 18446744073709551616.0)) return {std::numeric_limits<std::uint64_t>::max(), true};
  return {static_cast<std::uint64_t>(x), false};
}

}  // namespace ipclab
