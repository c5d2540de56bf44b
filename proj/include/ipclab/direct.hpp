#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ipclab/offspring.hpp"
#include "ipclab/rng.hpp"

namespace ipclab {

/// Smallest of m i.i.d. Unif[0,1]: 1 - U^{1/m}.
double first_order_statistic(double m, Philox& rng);
/// Next order statistic given the j-th smallest `prev` of m: prev + (1 - prev)(1 - U^{1/(m-j)}).
double next_order_statistic(double prev, double m, double j, Philox& rng);

struct FrontierEntry {
  double weight = 0.0;
  std::uint32_t parent = 0;
  double ordinal = 1.0;  ///< rank of this child among the parent's X children
  double remaining = 0.0;  ///< siblings not yet generated after this one
};

struct InvasionOptions {
  /// A child count above this stops the run with `capped` set.
  double child_cap = 1099511627776.0;  // 2^40
  /// Keep the frontier left over at the end (for replay checks).
  bool keep_frontier = false;
};

/// Vertices are stored in invasion order: vertex n (n >= 1) entered at step n
/// through the edge of weight weight[n].
struct InvadedTree {
  std::vector<std::uint32_t> parent;  ///< parent[0] is the root's own index
  std::vector<double> weight;         ///< weight[0] = 0
  std::vector<std::uint32_t> depth;
  std::vector<double> child_count;    ///< X drawn at each vertex
  std::vector<FrontierEntry> frontier;
  bool capped = false;
  double largest_child_count = 0.0;

  std::size_t steps() const noexcept { return parent.size() - 1; }
  std::size_t vertices() const noexcept { return parent.size(); }
};

/// Prim-style invasion from the root for n_steps. Each vertex pushes only its
/// smallest child weight; popping a child regenerates the next sibling lazily.
InvadedTree invade(const OffspringSpec& spec, std::size_t n_steps, Philox& rng, const InvasionOptions& opt = {});

struct Backbone {
  std::vector<std::uint32_t> path;  ///< v_0 .. v_k
  bool stable = false;              ///< same prefix from the first half of the run
  bool complete = false;            ///< the run reached depth k + 1 beyond the prefix
};

/// First k+1 vertices on the ancestral line of the last invaded vertex.
Backbone estimate_backbone(const InvadedTree& tree, std::size_t k);

struct KCut {
  double M = 0.0;      ///< vertices in the root component
  double C = 0.0;      ///< total edge weight of the root component
  double W_hat = 0.0;  ///< largest weight invaded in the removed part
};

/// Root component after removing the edge (v_k, v_{k+1}). Throws ModelError if
/// the backbone estimate does not reach v_{k+1}.
KCut extract_kcut(const InvadedTree& tree, const Backbone& backbone, std::size_t k);

/// Largest invaded weight after `burn_in` steps.
double check_selforganised_criticality(const InvadedTree& tree, std::size_t burn_in);

/// Running maximum of the invaded weights over the last `window` steps.
double window_max(const InvadedTree& tree, std::size_t window);

/// CSV with columns step,weight,depth; every `stride`-th step.
void write_trace_csv(std::ostream& os, const InvadedTree& tree, std::size_t stride = 1);

}  // namespace ipclab
