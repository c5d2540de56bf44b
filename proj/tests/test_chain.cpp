#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ipclab/chain.hpp"
#include "ipclab/stats.hpp"

using namespace ipclab;

namespace {
// |mean - target| within 3 standard errors
bool within_3se(const RunningMoments& m, double target) { return std::abs(m.mean() - target) <= 3.0 * m.se(); }
}  // namespace

TEST_CASE("W_0 has CDF theta") {
  const PercolationCurve c(OffspringSpec::sibuya(0.25));
  Philox rng(1, 0);
  RunningMoments m1, m23;
  for (int i = 0; i < 1000000; ++i) {
    const double w = sample_w0(c, rng);
    m1.add(w);
    m23.add(std::pow(w, 2.0 / 3.0));
  }
  INFO("E[W0]=" << m1.mean() << " se=" << m1.se());
  CHECK(within_3se(m1, 0.25));
  CHECK(within_3se(m23, 1.0 / 3.0));

  const PercolationCurve det(OffspringSpec::deterministic(2));
  std::vector<double> ws;
  for (int i = 0; i < 100000; ++i) ws.push_back(sample_w0(det, rng));
  CHECK(quantile(ws, 0.5) == doctest::Approx(2 - std::sqrt(2.0)).epsilon(0.01));
  const double ks = ks_one_sample(ws, [](double p) { return p <= 0.5 ? 0.0 : (2 * p - 1) / (p * p); });
  CHECK(ks < ks_one_sample_threshold(ws.size()));
}

TEST_CASE("stay frequency and jump factor law") {
  for (double a : {0.25, 0.75}) {
    const PercolationCurve c(OffspringSpec::sibuya(a));
    Philox rng(2, 0);
    std::size_t stays = 0, total = 0;
    std::vector<double> factors;
    while (total < 1000000) {
      const ChainPath p = simulate_chain(c, 50, BetaConvention::complement, rng);
      for (std::size_t k = 0; k < p.steps(); ++k) {
        ++total;
        if (!p.jumped[k]) {
          ++stays;
          CHECK(p.w[k + 1] == p.w[k]);
        } else if (factors.size() < 100000) {
          factors.push_back(std::exp(p.tau[k + 1] - p.tau[k]));
        }
      }
    }
    const double freq = static_cast<double>(stays) / total;
    const double sigma = std::sqrt(a * (1 - a) / total);
    INFO("alpha=" << a << " stay=" << freq);
    CHECK(std::abs(freq - a) < 3 * sigma);
    const double e = a / (1 - a);
    const double ks = ks_one_sample(factors, [e](double x) { return x <= 0 ? 0.0 : x >= 1 ? 1.0 : std::pow(x, e); });
    CHECK(ks < ks_one_sample_threshold(factors.size()));
  }
}

TEST_CASE("jump probability equals m1 theta / theta'") {
  for (const auto& s : {OffspringSpec::discrete_pareto(1.5), OffspringSpec::discrete_pareto(3.0),
                        OffspringSpec::deterministic(2), OffspringSpec::sibuya(0.4)}) {
    const PercolationCurve c(s);
    for (double f : {0.1, 0.4, 0.8}) {
      const double w = c.p_c() + f * (1 - c.p_c());
      const double th = solve_theta(s, w);
      const double m1 = tilted_moments(s, w, th).m1;
      const double expect = m1 * th / theta_prime(c, w);
      INFO(s.label() << " w=" << w);
      CHECK(jump_probability_tau(c, c.tau_of(w)) == doctest::Approx(expect).epsilon(1e-7));
    }
  }
}

TEST_CASE("beta conventions") {
  const double a = 0.25;
  const PercolationCurve c(OffspringSpec::sibuya(a));
  for (auto conv : {BetaConvention::paper, BetaConvention::complement}) {
    Philox rng(3, 0);
    RunningMoments ratio;
    for (int r = 0; r < 20000; ++r) {
      const ChainPath p = simulate_chain(c, 10, conv, rng);
      for (std::size_t k = 0; k < p.steps(); ++k) {
        ratio.add(p.beta[k] / p.w[k]);
        CHECK(p.beta[k] <= p.w[k]);
      }
    }
    const double target = conv == BetaConvention::paper ? (1 + a) / 2 : (1 - a) + a / 2;
    INFO(to_string(conv) << " mean=" << ratio.mean());
    CHECK(within_3se(ratio, target));
  }
  Philox rng(4, 0);
  for (int i = 0; i < 1000; ++i) {
    const double b = sample_beta(0.5, 0.5, false, BetaConvention::complement, rng);
    CHECK(b >= 0.0);
    CHECK(b <= 0.5);
  }
}

TEST_CASE("product representation") {
  Philox rng(5, 0);
  RunningMoments w1, p1;
  std::size_t ones = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const ChainPath p = sample_product_chain(0.25, 1, rng);
    w1.add(p.w[1]);
    p1.add(std::exp(sample_log_ratio_factor(0.25, rng)));
    if (sample_log_ratio_factor(0.5, rng) == 0.0) ++ones;
  }
  CHECK(within_3se(w1, 0.109375));
  CHECK(within_3se(p1, 0.4375));
  CHECK(std::abs(static_cast<double>(ones) / n - 0.5) < 3 * std::sqrt(0.25 / n));

  // product chain and step() chain agree in law at k = 10
  const PercolationCurve c(OffspringSpec::sibuya(0.25));
  std::vector<double> a, b;
  for (int i = 0; i < 100000; ++i) {
    a.push_back(sample_product_chain(0.25, 10, rng).tau[10]);
    b.push_back(simulate_chain(c, 10, BetaConvention::complement, rng).tau[10]);
  }
  CHECK(ks_two_sample(a, b) < ks_two_sample_threshold(a.size(), b.size()));
}

TEST_CASE("ratio limit") {
  Philox rng(6, 0);
  const PercolationCurve c75(OffspringSpec::sibuya(0.75));
  const double d1 = check_ratio_limit(c75, 50, 1, 100000, rng);
  MESSAGE("KS lag1 alpha=0.75: " << d1);
  CHECK(d1 < 0.0087);
  const PercolationCurve c25(OffspringSpec::sibuya(0.25));
  const double d2 = check_ratio_limit(c25, 50, 2, 100000, rng);
  MESSAGE("KS lag2 alpha=0.25: " << d2);
  CHECK(d2 < 0.0087);
  CHECK(check_ratio_limit(c25, 50, 0, 1000, rng) == 0.0);
}

TEST_CASE("exponential decay rate") {
  const PercolationCurve c(OffspringSpec::sibuya(0.25));
  Philox rng(7, 0);
  RunningMoments slope;
  for (int r = 0; r < 1000; ++r) {
    const ChainPath p = simulate_chain(c, 200, BetaConvention::complement, rng);
    const DecayRate d = check_exponential_bounds(p);
    REQUIRE(d.applicable);
    CHECK(d.negative_and_finite);
    slope.add(d.rate);
  }
  CHECK(slope.mean() == doctest::Approx(-2.25).epsilon(0.05));

  const PercolationCurve det(OffspringSpec::deterministic(2));
  const ChainPath p = simulate_chain(det, 50, BetaConvention::complement, rng);
  CHECK_FALSE(check_exponential_bounds(p).applicable);
}

TEST_CASE("pathwise invariants") {
  Philox rng(8, 0);
  for (const auto& s : {OffspringSpec::sibuya(0.25), OffspringSpec::sibuya(0.75), OffspringSpec::discrete_pareto(3.0),
                        OffspringSpec::discrete_pareto(1.5), OffspringSpec::deterministic(2)}) {
    const PercolationCurve c(s);
    for (auto conv : {BetaConvention::paper, BetaConvention::complement})
      for (int r = 0; r < 300; ++r) {
        const ChainPath p = simulate_chain(c, 100, conv, rng);
        const std::string bad = check_chain_invariants(p);
        INFO(s.label() << ": " << bad);
        CHECK(bad.empty());
      }
  }
}

TEST_CASE("chain csv") {
  Philox rng(9, 0);
  const ChainPath p = sample_product_chain(0.3, 3, rng);
  std::ostringstream os;
  write_chain_csv(os, p);
  const std::string s = os.str();
  CHECK(s.rfind("k,W_k,beta_k,jumped\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
}
