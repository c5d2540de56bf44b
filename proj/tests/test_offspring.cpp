#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>

#include "ipclab/offspring.hpp"
#include "ipclab/stats.hpp"

using namespace ipclab;
using doctest::Approx;

namespace {
// Coefficient of s^k in 1 - (1-s)^a via the Gamma function.
double sibuya_pmf_oracle(double a, int k) {
  return a * std::exp(std::lgamma(k - a) - std::lgamma(1.0 - a) - std::lgamma(k + 1.0));
}
double sibuya_survival_oracle(double a, double k) {
  return boost::math::tgamma_delta_ratio(k + 1.0 - a, a) / boost::math::tgamma(1.0 - a);
}
}  // namespace

TEST_CASE("pmf examples") {
  const auto s = OffspringSpec::sibuya(0.25);
  CHECK(pmf(s, 1) == Approx(0.25).epsilon(1e-15));
  CHECK(pmf(s, 2) == Approx(0.09375).epsilon(1e-15));
  const auto d = OffspringSpec::deterministic(2);
  CHECK(pmf(d, 2) == 1.0);
  CHECK(pmf(d, 3) == 0.0);
  CHECK_THROWS_AS(pmf(s, 0), std::domain_error);
  CHECK_THROWS_AS(pmf(s, -3), std::domain_error);
  for (int k : {1, 2, 5, 17, 100, 2000})
    CHECK(pmf(s, k) == Approx(sibuya_pmf_oracle(0.25, k)).epsilon(1e-11));
  const auto p = OffspringSpec::discrete_pareto(3.0);
  CHECK(pmf(p, 1) == Approx(1.0 - 1.0 / 8.0));
  CHECK(pmf(p, 5000) == Approx(std::pow(5000.0, -3) - std::pow(5001.0, -3)).epsilon(1e-12));
}

TEST_CASE("survival examples") {
  CHECK(survival(OffspringSpec::sibuya(0.5), 1) == Approx(0.5));
  CHECK(survival(OffspringSpec::discrete_pareto(3.0), 9) == Approx(0.001).epsilon(1e-14));
  CHECK(survival(OffspringSpec::sibuya(0.3), 0) == 1.0);
  CHECK(survival(OffspringSpec::discrete_pareto(1.5), 0) == 1.0);
  CHECK(survival(OffspringSpec::deterministic(4), 0) == 1.0);
  CHECK(survival(OffspringSpec::deterministic(4), 3) == 1.0);
  CHECK(survival(OffspringSpec::deterministic(4), 4) == 0.0);
  for (double k : {10.0, 1000.0, 99999.0, 100001.0, 1e7})
    CHECK(survival(OffspringSpec::sibuya(0.4), static_cast<std::int64_t>(k)) ==
          Approx(sibuya_survival_oracle(0.4, k)).epsilon(1e-11));
}

TEST_CASE("pmf + survival telescopes to one") {
  const std::vector<OffspringSpec> specs{OffspringSpec::sibuya(0.25), OffspringSpec::sibuya(0.75),
                                         OffspringSpec::discrete_pareto(1.5), OffspringSpec::discrete_pareto(3.0),
                                         OffspringSpec::deterministic(3)};
  for (const auto& s : specs) {
    double acc = 0.0;
    for (int k = 1; k <= 10000; ++k) {
      acc += pmf(s, k);
      if (k == 1 || k == 10 || k == 100 || k == 1000 || k == 10000) {
        INFO(s.label() << " K=" << k);
        CHECK(std::abs(acc + survival(s, k) - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("tail exponent: survival(k) k^alpha between positive constants") {
  for (const auto& s : {OffspringSpec::sibuya(0.25), OffspringSpec::sibuya(0.75), OffspringSpec::discrete_pareto(3.0)}) {
    double lo = 1e300, hi = 0;
    for (double k = 100; k <= 1e6; k *= 10) {
      const double r = survival(s, static_cast<std::int64_t>(k)) * std::pow(k, s.alpha());
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo < 1.1);
  }
}

TEST_CASE("generating function examples") {
  const auto g = gf(OffspringSpec::sibuya(0.5), 0.75);
  CHECK(g.f == Approx(0.5));
  CHECK(g.f1 == Approx(1.0));
  // alpha (1 - alpha) (1 - s)^(alpha - 2) = 0.25 * 0.25^-1.5
  CHECK(g.f2 == Approx(2.0));
  const auto d = gf(OffspringSpec::deterministic(2), 0.5);
  CHECK(d.f == Approx(0.25));
  CHECK(d.f1 == Approx(1.0));
  CHECK(d.f2 == Approx(2.0));
  for (const auto& s : {OffspringSpec::sibuya(0.3), OffspringSpec::discrete_pareto(0.75),
                        OffspringSpec::discrete_pareto(3.0), OffspringSpec::deterministic(5)}) {
    CHECK(gf(s, 1.0).f == 1.0);
    CHECK(gf(s, 0.0).f == 0.0);
  }
  CHECK_THROWS_AS(gf(OffspringSpec::sibuya(0.3), 1.1), std::domain_error);
  CHECK_THROWS_AS(gf(OffspringSpec::sibuya(0.3), -0.1), std::domain_error);
}

TEST_CASE("generating function equals the pmf power series") {
  for (const auto& s : {OffspringSpec::sibuya(0.25), OffspringSpec::sibuya(0.75), OffspringSpec::discrete_pareto(0.75),
                        OffspringSpec::discrete_pareto(1.5), OffspringSpec::discrete_pareto(3.0),
                        OffspringSpec::deterministic(3)}) {
    for (int i = 1; i <= 9; ++i) {
      const double x = 0.1 * i;
      double f = 0, f1 = 0, f2 = 0, pw = 1.0;  // pw = x^(k-1)
      for (int k = 1; k <= 20000; ++k) {
        const double pk = pmf(s, k);
        f1 += k * pk * pw;
        if (k >= 2) f2 += k * (k - 1.0) * pk * pw / x;
        pw *= x;
        f += pk * pw;
      }
      const auto g = gf(s, x);
      INFO(s.label() << " s=" << x);
      CHECK(std::abs(g.f - f) < 1e-9);
      CHECK(std::abs(g.f1 - f1) < 1e-9 * std::max(1.0, f1));
      CHECK(std::abs(g.f2 - f2) < 1e-9 * std::max(1.0, f2));
    }
  }
}

TEST_CASE("generating function is increasing and convex") {
  for (const auto& s : {OffspringSpec::sibuya(0.4), OffspringSpec::discrete_pareto(2.5), OffspringSpec::deterministic(2)}) {
    double prev_f = -1, prev_f1 = -1;
    for (int i = 0; i <= 50; ++i) {
      const auto g = gf(s, i / 50.0);
      CHECK(g.f >= prev_f);
      CHECK(g.f1 >= prev_f1);
      prev_f = g.f;
      prev_f1 = g.f1;
    }
  }
}

TEST_CASE("complement form is accurate near s = 1") {
  const auto p3 = OffspringSpec::discrete_pareto(3.0);
  const double z3 = boost::math::zeta(3.0);
  const double u = 1e-10;
  const auto c = gf_complement(p3, u);
  CHECK(c.fbar == Approx(z3 * u).epsilon(1e-6));
  CHECK(c.f1 == Approx(z3).epsilon(1e-6));
  for (double uu : {0.3, 0.05, 1e-3}) {
    const auto g = gf(p3, 1.0 - uu);
    const auto cc = gf_complement(p3, uu);
    CHECK(1.0 - g.f == Approx(cc.fbar).epsilon(1e-10));
    CHECK(g.f1 == Approx(cc.f1).epsilon(1e-10));
    CHECK(g.f2 == Approx(cc.f2).epsilon(1e-9));
  }
  const auto sib = gf_complement(OffspringSpec::sibuya(0.25), 1e-40);
  CHECK(sib.fbar == Approx(1e-10).epsilon(1e-12));
  CHECK(std::isinf(gf(OffspringSpec::sibuya(0.25), 1.0).f1));
  CHECK(std::isinf(gf_complement(OffspringSpec::discrete_pareto(1.5), 0.0).f2));
}

TEST_CASE("critical probability") {
  CHECK(critical_probability(OffspringSpec::deterministic(2)) == 0.5);
  CHECK(critical_probability(OffspringSpec::sibuya(0.25)) == 0.0);
  CHECK(critical_probability(OffspringSpec::discrete_pareto(0.9)) == 0.0);
  CHECK(critical_probability(OffspringSpec::discrete_pareto(1.0)) == 0.0);
  for (double a : {1.2, 1.5, 2.5, 3.0, 6.0})
    CHECK(std::abs(critical_probability(OffspringSpec::discrete_pareto(a)) - 1.0 / boost::math::zeta(a)) < 1e-12);
  CHECK(critical_probability(OffspringSpec::discrete_pareto(3.0)) == Approx(0.83190737258070746).epsilon(1e-14));
}

TEST_CASE("samplers: examples") {
  Philox rng(11, 0);
  for (int i = 0; i < 100; ++i) CHECK(sample_real(OffspringSpec::deterministic(3), rng) == 3.0);
  CHECK(sample(OffspringSpec::deterministic(3), rng) == 3);

  const auto s = OffspringSpec::sibuya(0.5);
  const int n = 1000000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += sample_real(s, rng) == 1.0;
  const double sigma = std::sqrt(0.25 / n);
  CHECK(std::abs(ones / double(n) - 0.5) < 3 * sigma);

  const auto p = OffspringSpec::discrete_pareto(3.0);
  RunningMoments m;
  for (int i = 0; i < n; ++i) m.add(sample_real(p, rng));
  CHECK(std::abs(m.mean() - boost::math::zeta(3.0)) < 3 * m.se());
}

TEST_CASE("samplers: KS against the survival function") {
  struct Case {
    OffspringSpec spec;
    SamplerOptions opt;
  };
  SamplerOptions inv;
  inv.sibuya_method = SibuyaMethod::inversion;
  inv.inversion_cutoff = 10000;
  const std::vector<Case> cases{{OffspringSpec::sibuya(0.25), {}},           {OffspringSpec::sibuya(0.75), {}},
                                {OffspringSpec::sibuya(0.25), inv},          {OffspringSpec::sibuya(0.75), inv},
                                {OffspringSpec::discrete_pareto(0.25), {}},  {OffspringSpec::discrete_pareto(0.75), {}},
                                {OffspringSpec::discrete_pareto(3.0), {}}};
  const int n = 100000;
  for (const auto& c : cases) {
    Philox rng(2024, 7);
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_real(c.spec, rng, c.opt);
    auto cdf = [&](double x) {
      if (x < 1) return 0.0;
      if (c.spec.family() == Family::sibuya) return 1.0 - sibuya_survival_oracle(c.spec.alpha(), std::floor(x));
      return 1.0 - std::pow(std::floor(x) + 1.0, -c.spec.alpha());
    };
    const double d = ks_discrete(xs, cdf);
    INFO(c.spec.label() << " method=" << static_cast<int>(c.opt.sibuya_method) << " D=" << d);
    CHECK(d < 1.63 / std::sqrt(double(n)));
  }
}

TEST_CASE("sibuya tail inversion crossover error") {
  for (double a : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const double cutoff = 1e6;
    const double exact = sibuya_survival_oracle(a, cutoff);
    CHECK(std::abs(sibuya_survival_asymptote(a, cutoff) - exact) < 1e-6);
  }
}

TEST_CASE("huge draws: unbounded and saturating representations") {
  const auto s = OffspringSpec::sibuya(0.1);
  Philox a(5, 1), b(5, 1);
  bool saw_overflow = false, saw_big = false;
  for (int i = 0; i < 20000; ++i) {
    const BigCount big = sample(s, a);
    const SaturatedDraw sat = sample_saturating(s, b);
    if (sat.overflow) {
      saw_overflow = true;
      CHECK(big > BigCount(std::numeric_limits<std::uint64_t>::max()));
      saw_big = true;
    } else {
      CHECK(big == BigCount(sat.value));
    }
  }
  CHECK(saw_overflow);
  CHECK(saw_big);
}
