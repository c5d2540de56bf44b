#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <json.hpp>

#include "ipclab/errors.hpp"
#include "ipclab/scaling.hpp"

using namespace ipclab;

namespace {
EnsembleConfig small(double alpha, std::size_t K, std::size_t N, std::uint64_t seed) {
  EnsembleConfig c;
  c.spec = OffspringSpec::sibuya(alpha);
  c.K = K;
  c.N = N;
  c.seed = seed;
  c.keep_rows = true;
  return c;
}
}  // namespace

TEST_CASE("determinism across runs and thread counts") {
  EnsembleConfig c = small(0.25, 5, 100, 42);
  const RunSummary a = run_ensemble(c);
  const RunSummary b = run_ensemble(c);
  CHECK(a.rows == b.rows);
  CHECK(per_k_csv(a) == per_k_csv(b));
  CHECK(summary_json(c, a) == summary_json(c, b));
  c.threads = 3;
  const RunSummary t3 = run_ensemble(c);
  CHECK(t3.rows == a.rows);
  CHECK(per_k_csv(t3) == per_k_csv(a));
  CHECK(a.invariant_failures == 0);
  c.seed = 43;
  CHECK(run_ensemble(c).rows != a.rows);
}

TEST_CASE("means are non-decreasing and SE shrinks like 1/sqrt(N)") {
  const RunSummary a = run_ensemble(small(0.25, 6, 20000, 1));
  const RunSummary b = run_ensemble(small(0.25, 6, 40000, 2));
  for (std::size_t k = 1; k <= 6; ++k) {
    CHECK(a.per_k[k].C.mean() >= a.per_k[k - 1].C.mean());
    CHECK(a.per_k[k].M.mean() >= a.per_k[k - 1].M.mean());
  }
  for (std::size_t k : {0, 3, 6}) {
    const double r = b.per_k[k].C.se() / a.per_k[k].C.se();
    INFO("k=" << k << " se ratio " << r);
    CHECK(std::abs(r - 1.0 / std::sqrt(2.0)) < 0.1 / std::sqrt(2.0));
    // two summaries differing only in seed agree within 3 joint SE
    CHECK(std::abs(a.per_k[k].C.mean() - b.per_k[k].C.mean()) < 3 * std::hypot(a.per_k[k].C.se(), b.per_k[k].C.se()));
  }
}

TEST_CASE("instances") {
  CHECK(instance_for(OffspringSpec::discrete_pareto(3.0)) == Instance::first);
  CHECK(instance_for(OffspringSpec::discrete_pareto(1.5)) == Instance::first);
  CHECK(instance_for(OffspringSpec::sibuya(0.75)) == Instance::second);
  CHECK(instance_for(OffspringSpec::sibuya(0.25)) == Instance::third);
  CHECK_THROWS_AS(instance_for(OffspringSpec::sibuya(0.5)), ConfigError);
  CHECK_THROWS_AS(instance_for(OffspringSpec::discrete_pareto(2.0)), ConfigError);
  CHECK_THROWS_AS(instance_for(OffspringSpec::deterministic(2)), ConfigError);
  CHECK(instance_from_string("instance2") == Instance::second);
  EnsembleConfig bad = small(0.25, 5, 99, 1);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("growth exponent fit") {
  std::vector<double> k, y2, y3;
  for (int i = 1; i <= 20; ++i) {
    k.push_back(i);
    y2.push_back(double(i) * i);
    y3.push_back(0.7 * i * i * i);
  }
  const LinearFit f2 = fit_growth_exponent(k, y2);
  CHECK(std::abs(f2.slope - 2.0) < 1e-9);
  const LinearFit f3 = fit_growth_exponent(k, y3);
  CHECK(f3.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f3.intercept == doctest::Approx(std::log(0.7)).epsilon(1e-12));
  CHECK_THROWS_AS(fit_growth_exponent({1, 2, 3}, {1, 2, 3}), std::domain_error);
  y2[4] = 0.0;
  CHECK_THROWS_AS(fit_growth_exponent(k, y2), std::domain_error);
}

TEST_CASE("instance tests run on small ensembles") {
  EnsembleConfig c;
  c.spec = OffspringSpec::discrete_pareto(3.0);
  c.K = 40;
  c.N = 200;
  c.seed = 5;
  const RunSummary r = run_ensemble(c);
  const RatioTest t = first_instance_ratio_test(c, r);
  CHECK(t.points.front().k == 0);
  CHECK(t.points.back().k == 40);
  CHECK(t.target == doctest::Approx(0.41595).epsilon(1e-4));
  CHECK(r.invariant_failures == 0);
  // C_k/M_k moves toward p_c/2 with k
  CHECK(std::abs(t.points.back().mean_ratio - t.target) < std::abs(t.points.front().mean_ratio - t.target));

  EnsembleConfig s = small(0.75, 20, 2000, 6);
  const RunSummary rs = run_ensemble(s);
  const StabilityTest st = second_instance_stability_test(s, rs, 1);
  CHECK(st.k_half == 10);
  CHECK(std::isfinite(st.ks));
  for (double v : second_instance_scaled(s, rs, 20, 0)) CHECK(v > 0.0);

  EnsembleConfig th = small(0.1, 20, 5000, 7);
  const RunSummary rt = run_ensemble(th);
  const PlateauTest pt = third_instance_convergence_test(th, rt);
  INFO("diff " << pt.diff << " se " << pt.diff_se << " ks " << pt.ks);
  CHECK(pt.pass);
}

TEST_CASE("failure leaves a partial summary") {
  EnsembleConfig c = small(0.25, 5, 200, 9);
  c.options.tree_vertex_cap = 3;
  c.options.bulk_tree_threshold = 1e300;
  c.options.bulk_vertex_threshold = 1e300;
  try {
    run_ensemble(c);
    FAIL("expected a failure");
  } catch (const EnsembleError& e) {
    CHECK(e.completed < c.N);
    CHECK(e.partial.N == e.completed);
  }
}

TEST_CASE("outputs") {
  EnsembleConfig c = small(0.25, 4, 100, 11);
  const RunSummary r = run_ensemble(c);
  const auto j = nlohmann::json::parse(summary_json(c, r, R"({"note":1})"));
  CHECK(j["config"]["seed"] == 11);
  CHECK(j["config"]["thin_count"] == "D-1");
  CHECK(j["per_k"].size() == 5);
  CHECK(j["results"]["note"] == 1);
  const std::string csv = per_k_csv(r);
  CHECK(csv.rfind("k,mean_C,", 0) == 0);
  const std::string svg = ensemble_svg(c, r);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>\n", svg.size() - 8) != std::string::npos);
}

TEST_CASE("parallel_for reports the lowest failing index") {
  std::vector<int> seen(50, 0);
  CHECK_THROWS_WITH(parallel_for(50, 4,
                                 [&](std::size_t i) {
                                   seen[i] = 1;
                                   if (i == 17 || i == 31) throw std::runtime_error("at " + std::to_string(i));
                                 }),
                    "at 17");
}
