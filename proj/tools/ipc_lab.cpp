// ipc_lab: invasion percolation cluster simulations, oracles and verification batteries.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "ipclab/direct.hpp"
#include "ipclab/errors.hpp"
#include "ipclab/io.hpp"
#include "ipclab/oracle.hpp"
#include "ipclab/percolation.hpp"
#include "ipclab/scaling.hpp"
#include "ipclab/verify.hpp"
#include "ipclab/version.hpp"

using namespace ipclab;
using json = nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, check_failed = 1, config_error = 2, model_error = 3, capped_run = 4 };

struct Args {
  std::string family;
  std::vector<double> alpha;
  std::int64_t fixed_value = 2;
  std::optional<std::size_t> k_max, steps, reps;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string thin = "D-1", beta = "complement", retention = "conditioned", edges = "T";
  bool no_backbone_weights = false;
  double forest_factor = 1.0;
  std::string pairing = "sampler";
  bool printed = false;
  std::string out, plot, in, json_out;
  double tol_theta = 1e-10, tol_ratio = 0.05, tol_ks = 0.05, tol_plateau = 2e-3, tol_ratio_limit = 0.0087;
  std::size_t points = 99;
  std::string sim_mode, verify_target;
};

double one_alpha(const Args& a, double fallback) {
  if (a.alpha.size() > 1) throw ConfigError("this command takes a single --alpha");
  return a.alpha.empty() ? fallback : a.alpha.front();
}

OffspringSpec make_spec(const Args& a, double alpha) {
  switch (family_from_string(a.family.empty() ? "sibuya" : a.family)) {
    case Family::sibuya: return OffspringSpec::sibuya(alpha);
    case Family::discrete_pareto: return OffspringSpec::discrete_pareto(alpha);
    case Family::deterministic: return OffspringSpec::deterministic(a.fixed_value);
  }
  throw ConfigError("unknown family");
}

TreeEdges edges_from(const std::string& s) {
  if (s == "T") return TreeEdges::progeny;
  if (s == "T+1") return TreeEdges::progeny_plus_one;
  return tree_edges_from_string(s);
}

Conventions conventions(const Args& a) {
  if (a.printed) return Conventions::printed();
  Conventions c;
  c.thin = thin_count_from_string(a.thin);
  c.beta = beta_convention_from_string(a.beta);
  c.retention = retention_from_string(a.retention);
  c.edges = edges_from(a.edges);
  c.include_backbone_weights = !a.no_backbone_weights;
  return c;
}

unsigned threads(const Args& a) {
  const unsigned t = a.threads.value_or(default_threads());
  if (t == 0) throw ConfigError("--threads must be positive");
  return t;
}

std::uint64_t require_seed(const Args& a) {
  if (!a.seed) throw ConfigError("--seed is required");
  return *a.seed;
}

json conventions_json(const Conventions& c) {
  json j;
  j["thin_count"] = to_string(c.thin);
  j["beta_convention"] = to_string(c.beta);
  j["retention"] = to_string(c.retention);
  j["tree_edges"] = to_string(c.edges);
  j["include_backbone_weights"] = c.include_backbone_weights;
  return j;
}

json config_json(const std::string& command, const Args& a, const json& extra) {
  json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["family"] = a.family.empty() ? "sibuya" : a.family;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

std::string config_line(const json& cfg) { return "# config: " + cfg.dump() + "\n"; }

std::string out_dir(const Args& a, const std::string& fallback) {
  const std::string d = a.out.empty() ? fallback : a.out;
  std::filesystem::create_directories(d);
  return d;
}

// ---- simulate ---------------------------------------------------------------

EnsembleConfig ensemble_config(const Args& a, double alpha) {
  EnsembleConfig c;
  c.spec = make_spec(a, alpha);
  c.K = a.k_max.value_or(20);
  c.N = a.reps.value_or(1000);
  c.seed = require_seed(a);
  c.threads = threads(a);
  c.options.conventions = conventions(a);
  c.keep_rows = true;
  return c;
}

json ensemble_json(const EnsembleConfig& c) {
  json j;
  j["alpha"] = c.spec.alpha();
  j["fixed_value"] = c.spec.fixed_value();
  j["k_max"] = c.K;
  j["reps"] = c.N;
  j["seed"] = c.seed;
  j["conventions"] = conventions_json(c.options.conventions);
  return j;
}

void write_ensemble(const std::string& dir, const EnsembleConfig& c, const RunSummary& run, const json& cfg,
                    const std::string& plot) {
  write_file_atomic(dir + "/paths.csv", config_line(cfg) + cluster_csv_header() + run.rows);
  write_file_atomic(dir + "/per_k.csv", config_line(cfg) + per_k_csv(run));
  json results;
  results["config_echo"] = cfg;
  write_file_atomic(dir + "/summary.json", summary_json(c, run, results.dump()));
  if (!plot.empty()) write_file_atomic(plot, ensemble_svg(c, run));
}

int simulate_structural(const Args& a) {
  const EnsembleConfig c = ensemble_config(a, one_alpha(a, 0.25));
  const json cfg = config_json("simulate structural", a, ensemble_json(c));
  const std::string dir = out_dir(a, "ipc_out");
  try {
    const RunSummary run = run_ensemble(c);
    write_ensemble(dir, c, run, cfg, a.plot);
    std::cout << "wrote " << dir << "/{paths.csv,per_k.csv,summary.json}; E[C_" << c.K
              << "] = " << format_double(run.per_k[c.K].C.mean()) << " +- " << format_double(run.per_k[c.K].C.se())
              << '\n';
    if (run.invariant_failures) {
      std::cerr << "invariant failure: " << run.first_invariant_failure << '\n';
      return model_error;
    }
    return ok;
  } catch (const EnsembleError& e) {
    if (e.partial.N > 0) write_ensemble(dir, c, e.partial, cfg, "");
    throw ModelError(std::string(e.what()) + " (" + std::to_string(e.completed) + " replications kept)");
  }
}

int simulate_direct(const Args& a) {
  const OffspringSpec spec = make_spec(a, one_alpha(a, 3.0));
  const std::size_t n = a.steps.value_or(100000), reps = a.reps.value_or(10), K = a.k_max.value_or(3);
  const std::uint64_t seed = require_seed(a);
  if (n < 10 || reps == 0 || K == 0) throw ConfigError("--steps >= 10, --reps >= 1 and --k-max >= 1 required");
  json extra;
  extra["alpha"] = spec.alpha();
  extra["fixed_value"] = spec.fixed_value();
  extra["k_max"] = K;
  extra["steps"] = n;
  extra["reps"] = reps;
  extra["seed"] = seed;
  const json cfg = config_json("simulate direct", a, extra);
  const std::string dir = out_dir(a, "ipc_out");

  struct Rep {
    std::string rows;
    double max_after_burn_in = 0.0;
    bool capped = false;
    double largest = 0.0;
  };
  std::vector<Rep> out(reps);
  std::string trace;
  parallel_for(reps, threads(a), [&](std::size_t r) {
    Philox rng(seed, r);
    const InvadedTree tree = invade(spec, n, rng);
    Rep& rep = out[r];
    rep.capped = tree.capped;
    rep.largest = tree.largest_child_count;
    rep.max_after_burn_in = check_selforganised_criticality(tree, n / 2);
    if (r == 0) {
      std::ostringstream os;
      write_trace_csv(os, tree, std::max<std::size_t>(1, n / 10000));
      trace = os.str();
    }
    if (tree.capped) return;
    std::ostringstream os;
    for (std::size_t k = 1; k <= K; ++k) {
      const Backbone b = estimate_backbone(tree, k);
      os << r << ',' << k;
      if (b.complete) {
        const KCut cut = extract_kcut(tree, b, k);
        os << ',' << format_double(cut.W_hat) << ',' << format_double(cut.M) << ',' << format_double(cut.C);
      } else {
        os << ",,,";
      }
      os << ',' << (b.stable ? 1 : 0) << '\n';
    }
    rep.rows = os.str();
  });

  std::string rows = "rep,k,W_hat,M,C,stable\n";
  json sum;
  sum["version"] = kVersion;
  sum["config"] = cfg;
  json per = json::array();
  std::size_t capped = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    rows += out[r].rows;
    json e;
    e["rep"] = r;
    e["capped"] = out[r].capped;
    e["largest_child_count"] = out[r].largest;
    e["max_weight_after_burn_in"] = out[r].max_after_burn_in;
    per.push_back(e);
    capped += out[r].capped;
  }
  sum["p_c"] = critical_probability(spec);
  sum["runs"] = per;
  sum["capped_runs"] = capped;
  write_file_atomic(dir + "/direct.csv", config_line(cfg) + rows);
  write_file_atomic(dir + "/trace_rep0.csv", config_line(cfg) + trace);
  write_file_atomic(dir + "/summary.json", sum.dump(2) + "\n");
  if (capped) {
    std::cerr << "capped run: " << capped << " of " << reps << " replications drew an offspring count above 2^40 ("
              << spec.label() << " has no finite mean); k-cut rows omitted for those runs, see " << dir
              << "/summary.json\n";
    return capped_run;
  }
  std::cout << "wrote " << dir << "/{direct.csv,trace_rep0.csv,summary.json}\n";
  return ok;
}

// ---- verify -----------------------------------------------------------------

int verify(const Args& a) {
  static const std::map<std::string, std::string> family_of = {
      {"theta", "sibuya"},     {"chain", "sibuya"},     {"ratio-limit", "sibuya"},
      {"example", "sibuya"},   {"instance2", "sibuya"}, {"instance3", "sibuya"},
      {"instance1", "discrete_pareto"}, {"crosscheck", "discrete_pareto"}};
  const auto f = family_of.find(a.verify_target);
  if (f != family_of.end() && !a.family.empty() && a.family != f->second)
    throw ConfigError("verify " + a.verify_target + " runs on the " + f->second + " family");
  VerifyOptions o;
  o.seed = a.seed.value_or(1);
  o.threads = threads(a);
  o.reps = a.reps.value_or(0);
  o.k_max = a.k_max.value_or(0);
  o.steps = a.steps.value_or(0);
  o.alphas = a.alpha;
  o.conventions = conventions(a);
  o.tol_theta = a.tol_theta;
  o.tol_ratio = a.tol_ratio;
  o.tol_ks = a.tol_ks;
  o.tol_plateau = a.tol_plateau;
  o.tol_ratio_limit = a.tol_ratio_limit;
  std::cout << "verify " << a.verify_target << " (seed " << o.seed << ", " << o.conventions.describe() << ")\n";
  const VerifyReport r = run_verify(a.verify_target, o);
  std::cout << r.table();
  if (!a.json_out.empty()) write_file_atomic(a.json_out, r.json() + "\n");
  return r.pass() ? ok : check_failed;
}

// ---- sweep / report ---------------------------------------------------------

int sweep(const Args& a) {
  if (a.alpha.empty()) throw ConfigError("sweep needs a non-empty --alpha grid");
  const std::string dir = out_dir(a, "ipc_sweep");
  std::string table = "alpha,instance,k,mean_C,se_C,mean_M,se_M,mean_ratio,se_ratio,oracle_C\n";
  std::vector<PlotSeries> mean_c, ratio;
  json points = json::array();
  bool failed = false;
  for (double alpha : a.alpha) {
    json p;
    p["alpha"] = alpha;
    try {
      const EnsembleConfig c = ensemble_config(a, alpha);
      std::string inst = "-";
      try {
        inst = to_string(instance_for(c.spec));
      } catch (const ConfigError&) {
      }
      std::optional<OracleConfig> oc;
      if (c.spec.family() == Family::sibuya && alpha < 0.5) oc = OracleConfig::sampler(alpha, c.options.conventions);
      std::ostringstream sub;
      sub << dir << "/alpha_" << alpha;
      std::filesystem::create_directories(sub.str());
      const RunSummary run = run_ensemble(c);
      write_ensemble(sub.str(), c, run, config_json("sweep", a, ensemble_json(c)), "");
      PlotSeries sc{"alpha=" + format_double(alpha).substr(0, 6), {}, {}}, sr = sc;
      for (std::size_t k = 0; k <= c.K; ++k) {
        const KStats& s = run.per_k[k];
        table += format_double(alpha) + ',' + inst + ',' + std::to_string(k) + ',' + format_double(s.C.mean()) + ',' +
                 format_double(s.C.se()) + ',' + format_double(s.M.mean()) + ',' + format_double(s.M.se()) + ',' +
                 format_double(s.ratio.mean()) + ',' + format_double(s.ratio.se()) + ',' +
                 (oc ? format_double(expected_Ck(*oc, static_cast<int>(k))) : std::string()) + '\n';
        sc.x.push_back(double(k));
        sc.y.push_back(s.C.mean());
        sr.x.push_back(double(k));
        sr.y.push_back(s.ratio.mean());
      }
      mean_c.push_back(sc);
      ratio.push_back(sr);
      const KStats& last = run.per_k[c.K];
      p["instance"] = inst;
      p["mean_C_K"] = last.C.mean();
      p["se_C_K"] = last.C.se();
      if (oc) {
        p["oracle_limit"] = expected_Ck_limit(*oc);
        p["oracle_C_K"] = expected_Ck(*oc, static_cast<int>(c.K));
        p["within_3se_of_oracle"] = std::abs(last.C.mean() - expected_Ck(*oc, static_cast<int>(c.K))) <= 3 * last.C.se();
      }
      p["status"] = "ok";
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      failed = true;
      p["status"] = "failed";
      p["error"] = e.what();
      std::cerr << "alpha=" << alpha << ": " << e.what() << '\n';
    }
    points.push_back(p);
  }
  json cfg;
  cfg["alphas"] = a.alpha;
  cfg["k_max"] = a.k_max.value_or(20);
  cfg["reps"] = a.reps.value_or(1000);
  cfg["seed"] = a.seed ? json(*a.seed) : json();
  cfg["conventions"] = conventions_json(conventions(a));
  const json full = config_json("sweep", a, cfg);
  write_file_atomic(dir + "/sweep.csv", config_line(full) + table);
  json sum;
  sum["config"] = full;
  sum["points"] = points;
  write_file_atomic(dir + "/sweep.json", sum.dump(2) + "\n");
  if (!a.plot.empty()) {
    const std::string c1 = svg_line_plot(mean_c, {"mean C_k", "k", "E[C_k]"});
    const std::string c2 = svg_line_plot(ratio, {"mean C_k / M_k", "k", "E[C_k/M_k]"});
    write_file_atomic(a.plot, svg_stack({c1, c2}, 720, 440));
  }
  std::cout << points.dump(2) << '\n';
  return failed ? check_failed : ok;
}

int report(const Args& a) {
  if (a.in.empty()) throw ConfigError("report needs --in <paths.csv>");
  std::ifstream is(a.in);
  if (!is) throw ConfigError("cannot open " + a.in);
  std::string first;
  std::getline(is, first);
  is.seekg(0);
  const RunSummary run = summarize_rows(read_csv(is));
  const std::string header = first.rfind("# config:", 0) == 0 ? first + "\n" : std::string();
  const std::string csv = header + per_k_csv(run);
  if (a.out.empty())
    std::cout << csv;
  else
    write_file_atomic(a.out, csv);
  if (!a.plot.empty()) {
    EnsembleConfig c;
    c.K = run.K();
    c.N = run.N;
    write_file_atomic(a.plot, ensemble_svg(c, run));
  }
  return ok;
}

// ---- oracle / curve ---------------------------------------------------------

int oracle(const Args& a) {
  const double alpha = one_alpha(a, 0.25);
  OracleConfig c = a.printed ? OracleConfig::printed(alpha) : OracleConfig::sampler(alpha, conventions(a));
  if (!a.printed) c.pairing = pairing_from_string(a.pairing);
  c.forest_factor = a.forest_factor;
  try {
    c.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  const int K = static_cast<int>(a.k_max.value_or(10));
  json extra;
  extra["alpha"] = alpha;
  extra["k_max"] = K;
  extra["oracle"] = c.describe();
  std::cout << config_line(config_json("oracle", a, extra)) << "k,E_B,E_C,limit\n";
  const double lim = expected_Ck_limit(c);
  for (const OracleRow& r : oracle_table(c, K))
    std::cout << r.k << ',' << format_double(r.Bk) << ',' << format_double(r.Ck) << ',' << format_double(lim) << '\n';
  return ok;
}

int curve(const Args& a) {
  const OffspringSpec spec = make_spec(a, one_alpha(a, 0.25));
  const PercolationCurve c(spec);
  if (a.points < 2) throw ConfigError("--points >= 2");
  json extra;
  extra["alpha"] = spec.alpha();
  extra["fixed_value"] = spec.fixed_value();
  extra["points"] = a.points;
  std::ostringstream os;
  os << config_line(config_json("curve dump", a, extra)) << "p,theta,stay_probability\n";
  const double pc = c.p_c();
  for (std::size_t i = 1; i <= a.points; ++i) {
    const double p = pc + (1.0 - pc) * double(i) / double(a.points + 1);
    os << format_double(p) << ',' << format_double(c.theta(p)) << ',' << format_double(c.stay_probability(p)) << '\n';
  }
  if (a.out.empty())
    std::cout << os.str();
  else
    write_file_atomic(a.out, os.str());
  return ok;
}

// ---- option wiring ----------------------------------------------------------

void model_opts(CLI::App* s, Args& a) {
  s->add_option("--family", a.family, "sibuya | discrete_pareto | deterministic");
  s->add_option("--alpha", a.alpha, "tail exponent (comma-separated grid where accepted)")->delimiter(',');
  s->add_option("--fixed-value", a.fixed_value, "offspring count of the deterministic family");
  s->add_option("--k-max", a.k_max, "largest backbone level K");
  s->add_option("--steps", a.steps, "invasion steps (direct mode)");
  s->add_option("--reps", a.reps, "replications");
  s->add_option("--seed", a.seed, "master seed");
  s->add_option("--threads", a.threads, "worker threads (default: IPC_LAB_THREADS or all cores)");
}

void convention_opts(CLI::App* s, Args& a) {
  s->add_option("--thin-count", a.thin, "D | D-1 backbone children offered to the forest");
  s->add_option("--beta-convention", a.beta, "paper | complement");
  s->add_option("--retention", a.retention, "plain | conditioned");
  s->add_option("--tree-edges", a.edges, "T | T+1 weighted edges per finite tree");
  s->add_flag("--no-backbone-weights", a.no_backbone_weights, "leave beta out of C_k");
  s->add_flag("--printed", a.printed, "use the printed closed-form flags");
}

void tolerance_opts(CLI::App* s, Args& a) {
  s->add_option("--tolerance-theta", a.tol_theta);
  s->add_option("--tolerance-ratio", a.tol_ratio);
  s->add_option("--tolerance-ks", a.tol_ks);
  s->add_option("--tolerance-plateau", a.tol_plateau);
  s->add_option("--tolerance-ratio-limit", a.tol_ratio_limit);
}

}  // namespace

int main(int argc, char** argv) {
  Args a;
  CLI::App app{"Invasion percolation cluster lab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run an ensemble and write CSV/JSON");
  sim->add_option("mode", a.sim_mode, "structural | direct")->required()->check(CLI::IsMember({"structural", "direct"}));
  model_opts(sim, a);
  convention_opts(sim, a);
  sim->add_option("--out", a.out, "output directory");
  sim->add_option("--plot", a.plot, "SVG file");

  auto* ver = app.add_subcommand("verify", "run an acceptance battery");
  ver->add_option("target", a.verify_target)->required()->check(CLI::IsMember(verify_targets()));
  model_opts(ver, a);
  convention_opts(ver, a);
  tolerance_opts(ver, a);
  ver->add_option("--json", a.json_out, "write the report as JSON");

  auto* sw = app.add_subcommand("sweep", "ensembles over an alpha grid");
  model_opts(sw, a);
  convention_opts(sw, a);
  sw->add_option("--out", a.out, "output directory");
  sw->add_option("--plot", a.plot, "SVG file");

  auto* rep = app.add_subcommand("report", "recompute per-k aggregates from a per-replication CSV");
  rep->add_option("--in", a.in, "paths.csv written by simulate structural")->required();
  rep->add_option("--out", a.out, "per-k CSV (stdout if omitted)");
  rep->add_option("--plot", a.plot, "SVG file");

  auto* orc = app.add_subcommand("oracle", "closed-form E[B_k], E[C_k] for the Sibuya family, alpha < 1/2");
  orc->add_option("--alpha", a.alpha)->delimiter(',');
  orc->add_option("--k-max", a.k_max);
  convention_opts(orc, a);
  orc->add_option("--forest-factor", a.forest_factor, "0.5 | 1");
  orc->add_option("--pairing", a.pairing, "sampler | paper");

  auto* cur = app.add_subcommand("curve", "tabulate theta on (p_c, 1)");
  cur->add_option("what", a.in)->check(CLI::IsMember({"dump"}));
  cur->add_option("--family", a.family);
  cur->add_option("--alpha", a.alpha)->delimiter(',');
  cur->add_option("--fixed-value", a.fixed_value);
  cur->add_option("--points", a.points);
  cur->add_option("--out", a.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  try {
    if (*sim) return a.sim_mode == "structural" ? simulate_structural(a) : simulate_direct(a);
    if (*ver) return verify(a);
    if (*sw) return sweep(a);
    if (*rep) return report(a);
    if (*orc) return oracle(a);
    if (*cur) return curve(a);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return model_error;
  }
  return config_error;
}
