#include "ipclab/direct.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

#include "ipclab/errors.hpp"
#include "ipclab/io.hpp"

namespace ipclab {

double first_order_statistic(double m, Philox& rng) { return -std::expm1(std::log(uniform_open(rng)) / m); }

double next_order_statistic(double prev, double m, double j, Philox& rng) {
  return prev + (1.0 - prev) * -std::expm1(std::log(uniform_open(rng)) / (m - j));
}

namespace {
struct Later {
  bool operator()(const FrontierEntry& a, const FrontierEntry& b) const {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.parent != b.parent) return a.parent > b.parent;
    return a.ordinal > b.ordinal;
  }
};
}  // namespace

InvadedTree invade(const OffspringSpec& spec, std::size_t n_steps, Philox& rng, const InvasionOptions& opt) {
  InvadedTree t;
  t.parent.reserve(n_steps + 1);
  t.weight.reserve(n_steps + 1);
  t.depth.reserve(n_steps + 1);
  t.child_count.reserve(n_steps + 1);
  std::priority_queue<FrontierEntry, std::vector<FrontierEntry>, Later> frontier;

  // returns false when the child count exceeds the cap
  auto add_vertex = [&](std::uint32_t par, double w, std::uint32_t d) {
    const auto id = static_cast<std::uint32_t>(t.parent.size());
    const double X = sample_real(spec, rng);
    t.parent.push_back(par);
    t.weight.push_back(w);
    t.depth.push_back(d);
    t.child_count.push_back(X);
    t.largest_child_count = std::max(t.largest_child_count, X);
    if (X > opt.child_cap) return false;
    if (X >= 1.0) frontier.push({first_order_statistic(X, rng), id, 1.0, X - 1.0});
    return true;
  };

  if (!add_vertex(0, 0.0, 0)) t.capped = true;
  while (!t.capped && t.steps() < n_steps && !frontier.empty()) {
    const FrontierEntry e = frontier.top();
    frontier.pop();
    if (e.remaining > 0.0) {
      const double X = t.child_count[e.parent];
      frontier.push({next_order_statistic(e.weight, X, e.ordinal, rng), e.parent, e.ordinal + 1.0, e.remaining - 1.0});
    }
    if (!add_vertex(e.parent, e.weight, t.depth[e.parent] + 1)) t.capped = true;
  }
  if (opt.keep_frontier) {
    while (!frontier.empty()) {
      t.frontier.push_back(frontier.top());
      frontier.pop();
    }
  }
  return t;
}

namespace {
std::vector<std::uint32_t> ancestral_line(const InvadedTree& t, std::uint32_t v) {
  std::vector<std::uint32_t> line;
  for (;;) {
    line.push_back(v);
    if (v == 0) break;
    v = t.parent[v];
  }
  std::reverse(line.begin(), line.end());
  return line;
}
}  // namespace

Backbone estimate_backbone(const InvadedTree& tree, std::size_t k) {
  Backbone b;
  const auto last = static_cast<std::uint32_t>(tree.vertices() - 1);
  auto line = ancestral_line(tree, last);
  b.complete = line.size() >= k + 2;
  const auto half = ancestral_line(tree, static_cast<std::uint32_t>((tree.vertices() - 1) / 2));
  line.resize(std::min(line.size(), k + 1));
  b.stable = half.size() >= k + 2 && std::equal(line.begin(), line.end(), half.begin());
  b.path = std::move(line);
  return b;
}

KCut extract_kcut(const InvadedTree& tree, const Backbone& backbone, std::size_t k) {
  if (!backbone.complete || backbone.path.size() < k + 1)
    throw ModelError("backbone estimate does not reach depth " + std::to_string(k + 1));
  // v_{k+1} is the depth-(k+1) ancestor of the last invaded vertex
  std::uint32_t cut = static_cast<std::uint32_t>(tree.vertices() - 1);
  while (tree.depth[cut] > k + 1) cut = tree.parent[cut];
  if (tree.parent[cut] != backbone.path[k]) throw ModelError("backbone path is inconsistent with the tree");

  // parents precede children, so one forward pass marks the removed subtree
  std::vector<char> removed(tree.vertices(), 0);
  KCut out;
  for (std::size_t v = 0; v < tree.vertices(); ++v) {
    if (v == cut || (v > 0 && removed[tree.parent[v]])) {
      removed[v] = 1;
      out.W_hat = std::max(out.W_hat, tree.weight[v]);
      continue;
    }
    out.M += 1.0;
    out.C += tree.weight[v];
  }
  return out;
}

double check_selforganised_criticality(const InvadedTree& tree, std::size_t burn_in) {
  double m = 0.0;
  for (std::size_t v = burn_in + 1; v < tree.vertices(); ++v) m = std::max(m, tree.weight[v]);
  return m;
}

double window_max(const InvadedTree& tree, std::size_t window) {
  const std::size_t n = tree.steps();
  return check_selforganised_criticality(tree, n > window ? n - window : 0);
}

void write_trace_csv(std::ostream& os, const InvadedTree& tree, std::size_t stride) {
  os << "step,weight,depth\n";
  stride = std::max<std::size_t>(stride, 1);
  for (std::size_t v = 1; v < tree.vertices(); v += stride)
    os << v << ',' << format_double(tree.weight[v]) << ',' << tree.depth[v] << '\n';
}

}  // namespace ipclab
