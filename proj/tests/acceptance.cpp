// Acceptance run: one battery per criterion, detail tables on stderr, one PASS/FAIL line per criterion on stdout.
// Also writes acceptance_report.txt. The exit status is non-zero only when a battery throws.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ipclab/scaling.hpp"
#include "ipclab/verify.hpp"

using namespace ipclab;

namespace {

struct Criterion {
  int id;
  std::string name;
  std::string target;
  VerifyOptions opt;
  double budget_s;
};

VerifyOptions base() {
  VerifyOptions o;
  o.seed = 20240601;
  o.threads = default_threads();
  return o;
}

VerifyOptions with(std::size_t reps, std::size_t k_max, std::size_t steps, std::vector<double> alphas = {}) {
  VerifyOptions o = base();
  o.reps = reps;
  o.k_max = k_max;
  o.steps = steps;
  o.alphas = std::move(alphas);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "theta closed form", "theta", with(0, 0, 0, {0.1, 0.2, 0.25, 1.0 / 3.0, 0.45}), 5},
      {2, "theta exponents", "exponents", base(), 30},
      {3, "weight chain law", "chain", with(100000, 0, 1000000, {0.25, 0.75}), 60},
      {4, "ratio limit", "ratio-limit", with(100000, 0, 0, {0.25, 0.75}), 120},
      {5, "worked example", "example", with(100000, 10, 0, {0.2, 0.25, 0.3}), 600},
      {6, "third instance", "instance3", with(100000, 40, 0, {0.25}), 600},
      {7, "second instance", "instance2", with(10000, 80, 0, {0.6, 0.75}), 600},
      {8, "first instance", "instance1", with(1000, 200, 0, {3.0, 1.5}), 1200},
      {9, "self-organised criticality", "soc", with(0, 0, 1000000), 300},
      {10, "direct vs structural", "crosscheck", with(1000, 3, 1000000, {3.0}), 1800},
      {11, "invariants", "invariants", base(), 600},
  };

  std::vector<std::string> lines;
  std::string tables;
  int failed = 0, errors = 0;
  for (const Criterion& c : criteria) {
    std::cerr << "== criterion " << c.id << ": " << c.name << " ==\n";
    bool pass = false;
    std::string summary;
    double seconds = 0.0;
    try {
      const VerifyReport r = run_verify(c.target, c.opt);
      std::cerr << r.table();
      tables += "== criterion " + std::to_string(c.id) + ": " + c.name + " ==\n" + r.table();
      pass = r.pass();
      seconds = r.seconds;
      std::size_t bad = 0;
      for (const Check& k : r.checks) bad += !k.pass;
      summary = std::to_string(r.checks.size() - bad) + "/" + std::to_string(r.checks.size()) + " checks";
      if (c.id == 5)
        for (const std::string& n : r.notes)
          if (n.rfind("printed limit", 0) == 0) summary += "; " + n;
    } catch (const std::exception& e) {
      summary = std::string("error: ") + e.what();
      ++errors;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, ", %.1f s (budget %.0f s)", seconds, c.budget_s);
    summary += buf;
    if (seconds > c.budget_s) {
      pass = false;
      summary += ", over budget";
    }
    failed += !pass;
    lines.push_back("criterion " + std::to_string(c.id) + " [" + c.name + "]: " + (pass ? "PASS" : "FAIL") + " (" +
                    summary + ")");
    std::cout << lines.back() << std::endl;
  }
  const std::string verdict = failed ? std::to_string(failed) + " criteria failed" : "all criteria passed";
  std::cout << verdict << '\n';
  std::ofstream report("acceptance_report.txt");
  for (const std::string& l : lines) report << l << '\n';
  report << verdict << "\n\n" << tables;
  return errors ? 1 : 0;
}
