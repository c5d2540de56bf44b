#include "ipclab/scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ipclab/errors.hpp"
#include "ipclab/io.hpp"
#include "ipclab/version.hpp"

namespace ipclab {

std::string to_string(Instance i) {
  switch (i) {
    case Instance::first: return "first";
    case Instance::second: return "second";
    case Instance::third: return "third";
  }
  return "?";
}

Instance instance_from_string(const std::string& s) {
  if (s == "first" || s == "instance1") return Instance::first;
  if (s == "second" || s == "instance2") return Instance::second;
  if (s == "third" || s == "instance3") return Instance::third;
  throw ConfigError("unknown instance '" + s + "'");
}

Instance instance_for(const OffspringSpec& spec) {
  if (spec.family() == Family::deterministic) throw ConfigError("deterministic offspring has no tail exponent");
  const double a = spec.alpha();
  if (a > 1.0 && a != 2.0) return Instance::first;
  if (a > 0.5 && a < 1.0) return Instance::second;
  if (a > 0.0 && a < 0.5) return Instance::third;
  throw ConfigError("alpha = " + format_double(a) + " lies on a boundary between instances");
}

void EnsembleConfig::validate() const {
  if (N < 100) throw ConfigError("replications must be at least 100");
  if (K < 1) throw ConfigError("K_max must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

std::vector<double> RunSummary::column(const std::vector<double>& m, std::size_t k) const {
  const std::size_t stride = per_k.size();
  std::vector<double> out;
  if (m.size() != N * stride) return out;
  out.reserve(N);
  for (std::size_t r = 0; r < N; ++r) out.push_back(m[r * stride + k]);
  return out;
}

unsigned default_threads() {
  if (const char* env = std::getenv("IPC_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (i > failed_at) return;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (t == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

struct RepExtras {
  std::size_t approx = 0;
  std::string invariant;
  std::string rows;
  std::string error;
  bool done = false;
};

RunSummary merge(const EnsembleConfig& cfg, std::size_t reps, std::vector<double>& log_w, std::vector<double>& w,
                 std::vector<double>& C, std::vector<double>& M, std::vector<RepExtras>& extras) {
  const std::size_t stride = cfg.K + 1;
  RunSummary s;
  s.N = reps;
  s.per_k.resize(stride);
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t k = 0; k < stride; ++k) {
      const std::size_t i = r * stride + k;
      KStats& st = s.per_k[k];
      st.C.add(C[i]);
      st.M.add(M[i]);
      st.ratio.add(C[i] / M[i]);
      st.W.add(w[i]);
    }
    s.approx_levels += extras[r].approx;
    if (!extras[r].invariant.empty()) {
      if (s.invariant_failures == 0) s.first_invariant_failure = "rep " + std::to_string(r) + ": " + extras[r].invariant;
      ++s.invariant_failures;
    }
    if (cfg.keep_rows) s.rows += extras[r].rows;
  }
  if (cfg.keep_paths) {
    log_w.resize(reps * stride);
    C.resize(reps * stride);
    M.resize(reps * stride);
    s.log_w = std::move(log_w);
    s.C = std::move(C);
    s.M = std::move(M);
  }
  return s;
}

}  // namespace

RunSummary run_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  const PercolationCurve curve(cfg.spec);
  const std::size_t stride = cfg.K + 1;
  std::vector<double> log_w(cfg.N * stride), w(cfg.N * stride), C(cfg.N * stride), M(cfg.N * stride);
  std::vector<RepExtras> extras(cfg.N);
  const bool pc_zero = curve.p_c() == 0.0;

  auto body = [&](std::size_t r) {
    Philox rng(cfg.seed, r);
    const ClusterPath p = simulate_cluster(curve, cfg.K, cfg.options, rng);
    RepExtras& ex = extras[r];
    for (std::size_t k = 0; k < stride; ++k) {
      const std::size_t i = r * stride + k;
      log_w[i] = pc_zero ? p.chain.tau[k] : std::log(p.chain.w[k]);
      w[i] = p.chain.w[k];
      C[i] = p.C[k];
      M[i] = p.M[k];
      if (p.levels[k].approx) ++ex.approx;
    }
    ex.invariant = check_cluster_invariants(p);
    if (cfg.keep_rows) {
      std::ostringstream os;
      write_cluster_rows(os, r, p);
      ex.rows = os.str();
    }
    ex.done = true;
  };

  try {
    parallel_for(cfg.N, cfg.threads, body);
  } catch (const std::exception& e) {
    std::size_t completed = 0;
    while (completed < cfg.N && extras[completed].done) ++completed;
    RunSummary partial = merge(cfg, completed, log_w, w, C, M, extras);
    throw EnsembleError(std::string("replication ") + std::to_string(completed) + " failed: " + e.what(),
                        std::move(partial), completed);
  }
  return merge(cfg, cfg.N, log_w, w, C, M, extras);
}

RatioTest first_instance_ratio_test(const EnsembleConfig& cfg, const RunSummary& run, double tolerance) {
  RatioTest t;
  t.tolerance = tolerance;
  t.target = critical_probability(cfg.spec) / 2.0;
  const std::size_t K = run.K();
  std::vector<std::size_t> grid;
  for (std::size_t k : {0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000})
    if (k < K) grid.push_back(k);
  grid.push_back(K);
  for (std::size_t k : grid) {
    const KStats& s = run.per_k[k];
    t.points.push_back({k, s.C.mean() / s.M.mean(), s.ratio.mean(), s.ratio.se()});
  }
  t.rel_error = std::abs(run.per_k[K].ratio.mean() / t.target - 1.0);
  t.pass = t.target > 0.0 && t.rel_error <= tolerance;
  return t;
}

std::vector<double> second_instance_scaled(const EnsembleConfig& cfg, const RunSummary& run, std::size_t k,
                                           std::size_t ell) {
  if (ell > k) throw std::domain_error("ell exceeds k");
  const double a = cfg.spec.alpha();
  const double c = (2.0 * a - 1.0) / (1.0 - a);
  const auto lw = run.column(run.log_w, k);
  const auto C = run.column(run.C, k - ell);
  if (lw.empty()) throw std::logic_error("ensemble ran without keep_paths");
  std::vector<double> out(lw.size());
  for (std::size_t r = 0; r < lw.size(); ++r) out[r] = std::exp(c * lw[r] + std::log(C[r]));
  return out;
}

StabilityTest second_instance_stability_test(const EnsembleConfig& cfg, const RunSummary& run, std::size_t ell,
                                             double threshold) {
  StabilityTest t;
  t.ell = ell;
  t.threshold = threshold;
  t.k_full = run.K();
  t.k_half = t.k_full / 2;
  t.ks = ks_two_sample(second_instance_scaled(cfg, run, t.k_half, ell), second_instance_scaled(cfg, run, t.k_full, ell));
  t.pass = t.ks < threshold;
  return t;
}

PlateauTest third_instance_convergence_test(const EnsembleConfig&, const RunSummary& run, double tolerance,
                                            double ks_threshold) {
  PlateauTest t;
  t.tolerance = tolerance;
  t.ks_threshold = ks_threshold;
  t.k_full = run.K();
  t.k_half = t.k_full / 2;
  const auto a = run.column(run.C, t.k_half);
  const auto b = run.column(run.C, t.k_full);
  if (a.empty()) throw std::logic_error("ensemble ran without keep_paths");
  RunningMoments d;
  for (std::size_t r = 0; r < a.size(); ++r) d.add(b[r] - a[r]);
  t.diff = d.mean();
  t.diff_se = d.se();
  t.ks = ks_two_sample(a, b);
  t.pass = std::abs(t.diff) < tolerance + 3.0 * t.diff_se && t.ks < ks_threshold;
  return t;
}

LinearFit fit_growth_exponent(const std::vector<double>& k, const std::vector<double>& y) {
  if (k.size() != y.size() || k.size() < 10) throw std::domain_error("growth fit needs at least 10 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!(k[i] > 0.0) || !(y[i] > 0.0)) throw std::domain_error("growth fit needs positive data");
    lx.push_back(std::log(k[i]));
    ly.push_back(std::log(y[i]));
  }
  return linear_fit(lx, ly);
}

namespace {
nlohmann::ordered_json stats_json(const RunningMoments& m) {
  nlohmann::ordered_json j;
  j["mean"] = m.mean();
  j["variance"] = m.variance();
  j["se"] = m.se();
  return j;
}
}  // namespace

std::string summary_json(const EnsembleConfig& cfg, const RunSummary& run, const std::string& extra_json) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  nlohmann::ordered_json c;
  c["family"] = to_string(cfg.spec.family());
  c["alpha"] = cfg.spec.alpha();
  c["fixed_value"] = cfg.spec.fixed_value();
  c["k_max"] = cfg.K;
  c["replications"] = cfg.N;
  c["seed"] = cfg.seed;
  c["threads"] = cfg.threads;
  const Conventions& cv = cfg.options.conventions;
  c["thin_count"] = to_string(cv.thin);
  c["beta_convention"] = to_string(cv.beta);
  c["retention"] = to_string(cv.retention);
  c["tree_edges"] = to_string(cv.edges);
  c["include_backbone_weights"] = cv.include_backbone_weights;
  c["bulk_tree_threshold"] = cfg.options.bulk_tree_threshold;
  c["bulk_vertex_threshold"] = cfg.options.bulk_vertex_threshold;
  c["exact_weight_sum_max"] = cfg.options.exact_weight_sum_max;
  j["config"] = c;
  j["replications_completed"] = run.N;
  j["approx_levels"] = run.approx_levels;
  j["invariant_failures"] = run.invariant_failures;
  if (!run.first_invariant_failure.empty()) j["first_invariant_failure"] = run.first_invariant_failure;
  nlohmann::ordered_json ks = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < run.per_k.size(); ++k) {
    nlohmann::ordered_json e;
    e["k"] = k;
    e["C"] = stats_json(run.per_k[k].C);
    e["M"] = stats_json(run.per_k[k].M);
    e["C_over_M"] = stats_json(run.per_k[k].ratio);
    e["W"] = stats_json(run.per_k[k].W);
    ks.push_back(e);
  }
  j["per_k"] = ks;
  j["results"] = nlohmann::ordered_json::parse(extra_json);
  return j.dump(2) + "\n";
}

RunSummary summarize_rows(const CsvTable& t) {
  const std::size_t ck = t.column("k"), cw = t.column("w_k"), cm = t.column("M"), cc = t.column("C"),
                    cr = t.column("rep");
  RunSummary s;
  std::string last_rep;
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw ConfigError("ragged row in per-replication csv");
    const std::size_t k = std::stoul(row[ck]);
    if (k >= s.per_k.size()) s.per_k.resize(k + 1);
    const double C = std::stod(row[cc]), M = std::stod(row[cm]);
    KStats& st = s.per_k[k];
    st.C.add(C);
    st.M.add(M);
    st.ratio.add(C / M);
    st.W.add(std::stod(row[cw]));
    if (row[cr] != last_rep) ++s.N, last_rep = row[cr];
  }
  if (s.per_k.empty()) throw ConfigError("no rows to summarise");
  return s;
}

std::string per_k_csv(const RunSummary& run) {
  std::ostringstream os;
  os << "k,mean_C,var_C,se_C,mean_M,var_M,se_M,mean_ratio,se_ratio,mean_W\n";
  for (std::size_t k = 0; k < run.per_k.size(); ++k) {
    const KStats& s = run.per_k[k];
    os << k << ',' << format_double(s.C.mean()) << ',' << format_double(s.C.variance()) << ','
       << format_double(s.C.se()) << ',' << format_double(s.M.mean()) << ',' << format_double(s.M.variance()) << ','
       << format_double(s.M.se()) << ',' << format_double(s.ratio.mean()) << ',' << format_double(s.ratio.se())
       << ',' << format_double(s.W.mean()) << '\n';
  }
  return os.str();
}

std::string ensemble_svg(const EnsembleConfig& cfg, const RunSummary& run) {
  std::vector<double> ks, mc, mm, ratio;
  for (std::size_t k = 0; k < run.per_k.size(); ++k) {
    ks.push_back(static_cast<double>(k));
    mc.push_back(run.per_k[k].C.mean());
    mm.push_back(run.per_k[k].M.mean());
    ratio.push_back(run.per_k[k].ratio.mean());
  }
  const std::string tag = cfg.spec.label();
  PlotOptions o;
  o.x_label = "k";
  o.title = "Mean C_k and M_k, " + tag;
  o.y_label = "mean (log scale)";
  o.log_y = true;
  std::vector<std::string> charts{svg_line_plot({{"E[C_k]", ks, mc}, {"E[M_k]", ks, mm}}, o)};
  o.title = "Mean C_k / M_k, " + tag;
  o.y_label = "ratio";
  o.log_y = false;
  std::vector<PlotSeries> rs{{"E[C_k/M_k]", ks, ratio}};
  if (cfg.spec.family() != Family::sibuya) {
    const double half = critical_probability(cfg.spec) / 2.0;
    rs.push_back({"p_c/2", {ks.front(), ks.back()}, {half, half}});
  }
  charts.push_back(svg_line_plot(rs, o));
  if (!run.C.empty()) {
    std::vector<PlotSeries> qs;
    for (double q : {0.1, 0.5, 0.9}) {
      PlotSeries s;
      s.label = "q" + std::to_string(static_cast<int>(q * 100)) + " C_k";
      for (std::size_t k = 0; k < run.per_k.size(); ++k) {
        s.x.push_back(static_cast<double>(k));
        s.y.push_back(quantile(run.column(run.C, k), q));
      }
      qs.push_back(std::move(s));
    }
    o.title = "Quantiles of C_k, " + tag;
    o.y_label = "C_k";
    charts.push_back(svg_line_plot(qs, o));
  }
  return svg_stack(charts, 720, 440);
}

}  // namespace ipclab
