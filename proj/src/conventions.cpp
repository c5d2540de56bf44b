#include "ipclab/conventions.hpp"

#include "ipclab/errors.hpp"

namespace ipclab {

Conventions Conventions::printed() {
  Conventions c;
  c.thin = ThinCount::D_minus_1;
  c.beta = BetaConvention::paper;
  c.retention = Retention::conditioned;
  c.edges = TreeEdges::progeny_plus_one;
  c.include_backbone_weights = true;
  return c;
}

std::string Conventions::describe() const {
  return "thin=" + to_string(thin) + " beta=" + to_string(beta) + " retention=" + to_string(retention) +
         " edges=" + to_string(edges) + " backbone_weights=" + (include_backbone_weights ? "1" : "0");
}

std::string to_string(BetaConvention c) { return c == BetaConvention::paper ? "paper" : "complement"; }
std::string to_string(ThinCount c) { return c == ThinCount::D ? "D" : "D-1"; }
std::string to_string(Retention c) { return c == Retention::plain ? "plain" : "conditioned"; }
std::string to_string(TreeEdges c) { return c == TreeEdges::progeny ? "T" : "T+1"; }

BetaConvention beta_convention_from_string(const std::string& s) {
  if (s == "paper") return BetaConvention::paper;
  if (s == "complement") return BetaConvention::complement;
  throw ConfigError("unknown beta convention '" + s + "' (paper|complement)");
}

ThinCount thin_count_from_string(const std::string& s) {
  if (s == "D") return ThinCount::D;
  if (s == "D-1" || s == "D_minus_1") return ThinCount::D_minus_1;
  throw ConfigError("unknown thin count '" + s + "' (D|D-1)");
}

Retention retention_from_string(const std::string& s) {
  if (s == "plain") return Retention::plain;
  if (s == "conditioned") return Retention::conditioned;
  throw ConfigError("unknown retention '" + s + "' (plain|conditioned)");
}

TreeEdges tree_edges_from_string(const std::string& s) {
  if (s == "T" || s == "progeny") return TreeEdges::progeny;
  if (s == "T+1" || s == "progeny_plus_one") return TreeEdges::progeny_plus_one;
  throw ConfigError("unknown tree edge convention '" + s + "' (T|T+1)");
}

}  // namespace ipclab
