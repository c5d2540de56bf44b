#pragma once

#include <string>

namespace ipclab {

/// Which backbone edge carries beta_{k+1} = W_k.
///   paper:      beta = W_k when the chain stays, Unif[0, W_k] after a jump
///   complement: beta = W_k when the chain jumps, Unif[0, W_k] when it stays
enum class BetaConvention { paper, complement };

/// Number of backbone children offered to the finite forest.
enum class ThinCount { D, D_minus_1 };

/// Probability that a non-backbone child of a backbone vertex joins the cluster.
///   plain:       w
///   conditioned: w eta / (1 - w theta), the law given that the child does not
///                start a second infinite w-open path
enum class Retention { plain, conditioned };

/// Weighted edges contributed by a finite tree of |T| vertices.
enum class TreeEdges { progeny, progeny_plus_one };

struct Conventions {
  ThinCount thin = ThinCount::D_minus_1;
  BetaConvention beta = BetaConvention::complement;
  Retention retention = Retention::conditioned;
  TreeEdges edges = TreeEdges::progeny;
  bool include_backbone_weights = true;

  /// Flags under which the closed-form E[B_k | W_k] of the worked example holds.
  static Conventions printed();
  /// The sampler defaults spelled out, for symmetry with printed().
  static Conventions physical() { return {}; }

  std::string describe() const;
  bool operator==(const Conventions&) const = default;
};

std::string to_string(BetaConvention c);
std::string to_string(ThinCount c);
std::string to_string(Retention c);
std::string to_string(TreeEdges c);

/// Parsers throw ConfigError on unknown names.
BetaConvention beta_convention_from_string(const std::string& s);
ThinCount thin_count_from_string(const std::string& s);
Retention retention_from_string(const std::string& s);
TreeEdges tree_edges_from_string(const std::string& s);

}  // namespace ipclab
