#pragma once

#include <vector>

#include "spreadlab/strategy.hpp"

namespace spreadlab {

enum class AdmissibilityMode { NumeraireBased, NumeraireFree };

/// Which holdings a node-wise value refers to.
enum class Evaluation { PreTrade, PostTrade };

const char* to_string(AdmissibilityMode mode);

/// phi0 + (phi1)^+ (1 - lambda) S(n) - (phi1)^- S(n): long stock at the bid,
/// short stock bought back at the ask.
Rational liquidation_value(const Market& market, const Rational& phi0, const Rational& phi1, NodeId node);
Rational liquidation_value(const Market& market, const Rational& phi0, const Rational& phi1, NodeIndex node);

/// phi0(n) + phi1(n) * S_tilde(n).
Rational shadow_value(const EventTree& tree, const Strategy& strategy, const AdaptedProcess& shadow_price,
                      NodeIndex node, Evaluation which = Evaluation::PostTrade);

struct AdmissibilityReport {
  AdmissibilityMode mode = AdmissibilityMode::NumeraireBased;
  /// Smallest M with V_liq >= -M (resp. -M (1 + S)) everywhere; floored at 0.
  Rational minimal_M;
  NodeId worst_node;
  /// Per-node requirement: the larger of the pre- and post-trade values of
  /// -V_liq (divided by 1 + S in numeraire-free mode). Not floored.
  std::vector<Rational> per_node_bound;
  std::vector<Rational> liquidation_pre;
  std::vector<Rational> liquidation_post;
};

/// Evaluates the liquidation value of the pre-trade and post-trade holdings
/// at every node, at that node's prices.
AdmissibilityReport admissibility_bound(const Market& market, const Strategy& strategy, AdmissibilityMode mode);

}  // namespace spreadlab
