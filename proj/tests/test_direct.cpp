#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "ipclab/direct.hpp"
#include "ipclab/errors.hpp"
#include "ipclab/stats.hpp"
#include "ipclab/structural.hpp"

using namespace ipclab;

TEST_CASE("lazy order statistics have Beta marginals") {
  Philox rng(41, 0);
  for (double m : {2.0, 10.0, 100.0}) {
    const int n = 100000;
    const std::vector<int> ranks = m == 2.0 ? std::vector<int>{1, 2} : std::vector<int>{1, 2, static_cast<int>(m) / 2, static_cast<int>(m)};
    std::vector<std::vector<double>> draws(ranks.size());
    for (int r = 0; r < n; ++r) {
      double w = first_order_statistic(m, rng);
      std::size_t next = 0;
      for (int j = 1; j <= static_cast<int>(m); ++j) {
        if (j > 1) w = next_order_statistic(w, m, j - 1, rng);
        if (next < ranks.size() && ranks[next] == j) draws[next++].push_back(w);
      }
    }
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      const boost::math::beta_distribution<double> law(ranks[i], m + 1 - ranks[i]);
      const double ks = ks_one_sample(draws[i], [&](double x) { return boost::math::cdf(law, std::clamp(x, 0.0, 1.0)); });
      INFO("m=" << m << " j=" << ranks[i] << " ks=" << ks);
      CHECK(ks < ks_one_sample_threshold(n));
    }
  }
}

TEST_CASE("small deterministic invasion") {
  Philox rng(42, 0);
  InvasionOptions opt;
  opt.keep_frontier = true;
  const InvadedTree t = invade(OffspringSpec::deterministic(2), 3, rng, opt);
  CHECK(t.vertices() == 4);
  CHECK(t.steps() == 3);
  // each invaded weight is below every entry still waiting behind an earlier vertex
  for (const auto& f : t.frontier)
    for (std::size_t n = f.parent + 1; n < t.vertices(); ++n) CHECK(t.weight[n] < f.weight);
  // one pending entry per vertex that still has an uninvaded child
  std::vector<int> kids(t.vertices(), 0);
  for (std::size_t v = 1; v < t.vertices(); ++v) ++kids[t.parent[v]];
  CHECK(t.frontier.size() == static_cast<std::size_t>(std::count_if(kids.begin(), kids.end(), [](int c) { return c < 2; })));
  for (double w : t.weight) {
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);
  }
}

TEST_CASE("greedy replay against a naive rescan") {
  for (const auto& spec : {OffspringSpec::deterministic(2), OffspringSpec::discrete_pareto(3.0), OffspringSpec::discrete_pareto(1.5)}) {
    Philox rng(43, 0);
    InvasionOptions opt;
    opt.keep_frontier = true;
    const InvadedTree t = invade(spec, 5000, rng, opt);
    // candidate of vertex v at step n: its first child invaded at a step >= n, else its pending entry
    const std::size_t N = t.vertices();
    std::vector<std::vector<std::uint32_t>> kids(N);
    for (std::uint32_t v = 1; v < N; ++v) kids[t.parent[v]].push_back(v);
    std::vector<double> pending(N, std::numeric_limits<double>::infinity());
    for (const auto& f : t.frontier) pending[f.parent] = f.weight;
    std::vector<std::size_t> cursor(N, 0);
    bool ok = true;
    for (std::uint32_t n = 1; n < N && ok; ++n) {
      double best = std::numeric_limits<double>::infinity();
      for (std::uint32_t v = 0; v < n; ++v) {
        while (cursor[v] < kids[v].size() && kids[v][cursor[v]] < n) ++cursor[v];
        const double cand = cursor[v] < kids[v].size() ? t.weight[kids[v][cursor[v]]] : pending[v];
        best = std::min(best, cand);
      }
      if (best != t.weight[n]) ok = false;
    }
    INFO(spec.label());
    CHECK(ok);
  }
}

TEST_CASE("ray") {
  Philox rng(44, 0);
  const InvadedTree t = invade(OffspringSpec::deterministic(1), 20, rng);
  const Backbone b = estimate_backbone(t, 5);
  REQUIRE(b.path.size() == 6);
  for (std::uint32_t i = 0; i <= 5; ++i) CHECK(b.path[i] == i);
  CHECK(b.stable);
  const KCut c0 = extract_kcut(t, estimate_backbone(t, 0), 0);
  CHECK(c0.M == 1.0);
  CHECK(c0.C == 0.0);
  CHECK(estimate_backbone(t, 0).path == std::vector<std::uint32_t>{0});
  CHECK_THROWS_AS(extract_kcut(t, estimate_backbone(t, 30), 30), ModelError);
}

TEST_CASE("self-organised criticality") {
  Philox rng(45, 0);
  const InvadedTree d2 = invade(OffspringSpec::deterministic(2), 1000000, rng);
  CHECK(std::abs(check_selforganised_criticality(d2, 500000) - 0.5) < 0.01);

  const InvadedTree p3 = invade(OffspringSpec::discrete_pareto(3.0), 1000000, rng);
  const double pc3 = 1.0 / boost::math::zeta(3.0);
  CHECK(std::abs(window_max(p3, 100000) - pc3) < 0.01);

  const InvadedTree p15 = invade(OffspringSpec::discrete_pareto(1.5), 1000000, rng);
  CHECK(std::abs(check_selforganised_criticality(p15, 500000) - 1.0 / boost::math::zeta(1.5)) < 0.01);

  InvasionOptions capped;
  capped.child_cap = 1e6;
  const InvadedTree s = invade(OffspringSpec::sibuya(0.5), 1000000, rng, capped);
  MESSAGE("sibuya(0.5): capped=" << s.capped << " after " << s.steps() << " steps, estimate "
                                  << check_selforganised_criticality(s, s.steps() / 2));
  CHECK(s.capped);
  CHECK(check_selforganised_criticality(s, s.steps() / 2) < 0.05);
}

TEST_CASE("k-cut extraction") {
  Philox rng(46, 0);
  const OffspringSpec spec = OffspringSpec::discrete_pareto(3.0);
  int stable = 0;
  std::vector<double> direct_C;
  for (int r = 0; r < 100; ++r) {
    const InvadedTree t = invade(spec, 200000, rng);
    const Backbone b = estimate_backbone(t, 3);
    if (b.stable) ++stable;
    const KCut c = extract_kcut(t, b, 3);
    CHECK(c.C < c.M);
    CHECK(c.M >= 4.0);
    direct_C.push_back(c.C);
  }
  MESSAGE("backbone stability " << stable << "/100");
  CHECK(stable >= 95);

  // cross-check the mean against the structural sampler at reduced size
  const PercolationCurve curve(spec);
  RunningMoments s;
  for (int r = 0; r < 4000; ++r) s.add(simulate_cluster(curve, 3, {}, rng).C[3]);
  const RunningMoments d = moments_of(direct_C);
  INFO("direct " << d.mean() << " +- " << d.se() << ", structural " << s.mean() << " +- " << s.se());
  CHECK(std::abs(d.mean() - s.mean()) < 3.5 * std::hypot(d.se(), s.se()));
}

TEST_CASE("trace csv") {
  Philox rng(47, 0);
  const InvadedTree t = invade(OffspringSpec::deterministic(2), 10, rng);
  std::ostringstream os;
  write_trace_csv(os, t, 2);
  const std::string s = os.str();
  CHECK(s.rfind("step,weight,depth\n1,", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 6);
}
