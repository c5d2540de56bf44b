#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ipclab/errors.hpp"
#include "ipclab/percolation.hpp"
#include "ipclab/rng.hpp"

using namespace ipclab;
using doctest::Approx;

namespace {
std::vector<OffspringSpec> mixed_specs() {
  return {OffspringSpec::sibuya(0.25), OffspringSpec::sibuya(0.75), OffspringSpec::discrete_pareto(0.6),
          OffspringSpec::discrete_pareto(1.5), OffspringSpec::discrete_pareto(3.0), OffspringSpec::deterministic(2),
          OffspringSpec::deterministic(5)};
}
}  // namespace

TEST_CASE("solve_theta examples") {
  CHECK(solve_theta(OffspringSpec::deterministic(2), 0.75) == Approx(8.0 / 9.0).epsilon(1e-13));
  CHECK(solve_theta(OffspringSpec::sibuya(1.0 / 3.0), 0.25) == Approx(0.5).epsilon(1e-13));
  for (const auto& s : mixed_specs()) CHECK(solve_theta(s, 1.0) == 1.0);
  CHECK(solve_theta(OffspringSpec::deterministic(2), 0.5) == 0.0);
  CHECK(solve_theta(OffspringSpec::deterministic(2), 0.3) == 0.0);
  CHECK(solve_theta(OffspringSpec::discrete_pareto(3.0), 0.8) == 0.0);
  CHECK_THROWS_AS(solve_theta(OffspringSpec::sibuya(0.3), 1.5), std::domain_error);
}

TEST_CASE("fixed-point residual and monotonicity") {
  for (const auto& s : mixed_specs()) {
    const double pc = critical_probability(s);
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
      const double p = pc + (1.0 - pc) * std::pow(i / 200.0, 2.0);
      const double th = solve_theta(s, p);
      const double eta = 1.0 - th;
      const double resid = std::abs(eta - gf(s, 1.0 - p * th).f);
      INFO(s.label() << " p=" << p);
      CHECK(resid < 1e-12);
      CHECK(th >= prev);
      CHECK(th >= 0.0);
      CHECK(th <= 1.0);
      prev = th;
    }
  }
}

TEST_CASE("sibuya closed form p^(alpha/(1-alpha))") {
  for (double a : {0.1, 0.2, 0.25, 0.3, 1.0 / 3.0, 0.4, 0.45}) {
    const auto s = OffspringSpec::sibuya(a);
    double worst = 0.0;
    for (int i = 1; i <= 99; ++i) {
      const double p = i / 100.0;
      worst = std::max(worst, std::abs(solve_theta(s, p) - std::pow(p, a / (1 - a))));
    }
    INFO("alpha=" << a);
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("theta_prime examples and finite-difference cross-check") {
  const PercolationCurve sib(OffspringSpec::sibuya(0.25));
  CHECK(theta_prime(sib, 0.5) == Approx((1.0 / 3.0) * std::pow(0.5, -2.0 / 3.0)).epsilon(1e-12));
  CHECK(theta_prime(sib, 0.5) == Approx(0.52913).epsilon(1e-5));
  const PercolationCurve det(OffspringSpec::deterministic(2));
  CHECK(theta_prime(det, 0.75) == Approx(2 / 0.5625 - 2 * 0.5 / 0.421875).epsilon(1e-12));
  CHECK(theta_prime(det, 0.75) == Approx(1.18518).epsilon(1e-5));
  CHECK_THROWS_AS(theta_prime(det, 0.5), std::domain_error);

  Philox rng(3, 0);
  const auto specs = mixed_specs();
  for (int i = 0; i < 20; ++i) {
    const auto& s = specs[i % specs.size()];
    const PercolationCurve c(s);
    const double pc = c.p_c();
    const double p = pc + (1 - pc) * (0.05 + 0.9 * uniform01(rng));
    const double h = 1e-5 * (1 - pc);
    const double fd = (solve_theta(s, p + h) - solve_theta(s, p - h)) / (2 * h);
    INFO(s.label() << " p=" << p);
    CHECK(std::abs(theta_prime(c, p) - fd) < 1e-5 * std::abs(fd));
    CHECK(std::abs(c.theta_prime(p) - fd) < 1e-5 * std::abs(fd));
  }
}

TEST_CASE("theta_inverse examples and round trip") {
  const PercolationCurve sib(OffspringSpec::sibuya(1.0 / 3.0));
  CHECK(theta_inverse(sib, 0.5) == Approx(0.25).epsilon(1e-12));
  CHECK(theta_inverse(sib, 0.0) == 0.0);
  const PercolationCurve det(OffspringSpec::deterministic(2));
  CHECK(theta_inverse(det, 8.0 / 9.0) == Approx(0.75).epsilon(1e-9));
  CHECK(std::abs(det.theta(theta_inverse(det, 8.0 / 9.0)) - 8.0 / 9.0) < 1e-10);
  CHECK(theta_inverse(det, 0.0) == 0.5);
  CHECK(theta_inverse(det, 0.5) == Approx(2 - std::sqrt(2.0)).epsilon(1e-9));  // median 0.63397
  CHECK_THROWS_AS(theta_inverse(det, 1.5), std::domain_error);
  for (const auto& s : mixed_specs()) {
    const PercolationCurve c(s);
    const double pc = c.p_c();
    for (int i = 1; i <= 100; ++i) {
      const double p = pc + (1 - pc) * i / 100.0;
      const double y = solve_theta(s, p);
      INFO(s.label() << " p=" << p);
      CHECK(std::abs(c.inverse(y) - p) < 1e-8);
      CHECK(std::abs(c.theta(c.inverse(y)) - y) < 1e-10);
    }
  }
}

TEST_CASE("interpolated curve agrees with the exact solver") {
  Philox rng(17, 0);
  for (const auto& s : mixed_specs()) {
    const PercolationCurve c(s);
    const double pc = c.p_c();
    for (int i = 0; i < 200; ++i) {
      // log-uniform distance from criticality
      const double delta = std::exp(std::log(1e-9) * uniform01(rng)) * (1 - pc);
      const double p = pc + delta;
      const auto fp = solve_fixed_point(s, p);
      INFO(s.label() << " p=" << p);
      // near p_c the fixed point itself is only known to about eps pc / (delta (1 - stay))
      const double tol = std::max(1e-9, 1e-14 * (1.0 + pc / delta) / (1.0 - fp.stay));
      CHECK(std::abs(c.log_theta(p) - fp.log_theta) < tol);
      CHECK(std::abs(c.stay_probability(p) - fp.stay) < 1e-6);
    }
  }
}

TEST_CASE("stay probability equals w f'(1 - w theta)") {
  for (double a : {0.25, 0.6, 0.9}) {
    const PercolationCurve c(OffspringSpec::sibuya(a));
    for (double w : {1e-30, 1e-5, 0.1, 0.5, 0.99}) CHECK(c.stay_probability(w) == Approx(a).epsilon(1e-12));
  }
  const auto p3 = OffspringSpec::discrete_pareto(3.0);
  const PercolationCurve c(p3);
  for (double w : {0.84, 0.9, 0.99}) {
    const double th = solve_theta(p3, w);
    CHECK(c.stay_probability(w) == Approx(w * tilted_moments(p3, w, th).m1).epsilon(1e-7));
  }
}

TEST_CASE("tilted moments") {
  const auto s = OffspringSpec::sibuya(0.5);
  CHECK(tilted_moments(s, 0.5, 0.5).m1 == Approx(1.0));
  for (double a : {0.2, 0.45, 0.8})
    for (double w : {0.01, 0.3, 0.9}) {
      const double th = std::pow(w, a / (1 - a));
      CHECK(w * tilted_moments(OffspringSpec::sibuya(a), w, th).m1 == Approx(a).epsilon(1e-12));
    }
  const auto d = tilted_moments(OffspringSpec::deterministic(2), 1.0, 0.5);
  CHECK(d.m1 == Approx(1.0));
  CHECK(d.m2 == Approx(2.0));
  CHECK_THROWS_AS(tilted_moments(s, 0.5, 0.0), DivergentMoment);
}

TEST_CASE("near-critical exponent") {
  const auto f3 = check_theta_scaling(OffspringSpec::discrete_pareto(3.0));
  CHECK(f3.slope == Approx(1.0).epsilon(0.05));
  CHECK(f3.r2 > 0.999);
  const auto f15 = check_theta_scaling(OffspringSpec::discrete_pareto(1.5));
  CHECK(f15.slope == Approx(2.0).epsilon(0.05));
  CHECK(f15.r2 > 0.999);
  const auto fs = check_theta_scaling(OffspringSpec::sibuya(0.25));
  CHECK(fs.slope == Approx(1.0 / 3.0).epsilon(0.01));
  CHECK(fs.r2 > 0.999);
  ScalingGrid tiny;
  tiny.decades = 0;
  tiny.points_per_decade = 3;
  CHECK_THROWS_AS(check_theta_scaling(OffspringSpec::sibuya(0.25), tiny), std::domain_error);
  MESSAGE("slopes: " << f3.slope << " " << f15.slope << " " << fs.slope);
}
