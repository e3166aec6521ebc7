#include "spreadlab/valuation.hpp"

#include "spreadlab/kernels.hpp"

namespace spreadlab {

const char* to_string(AdmissibilityMode mode) {
  return mode == AdmissibilityMode::NumeraireBased ? "numeraire_based" : "numeraire_free";
}

Rational liquidation_value(const Market& market, const Rational& phi0, const Rational& phi1, NodeId node) {
  return liquidation_value(market, phi0, phi1, market.tree.index(node));
}

Rational liquidation_value(const Market& market, const Rational& phi0, const Rational& phi1, NodeIndex node) {
  if (node >= market.tree.size()) throw PreconditionError("node index out of range");
  const Rational& s = market.price[node];
  return phi0 + positive_part(phi1) * (1 - market.lambda) * s - negative_part(phi1) * s;
}

Rational shadow_value(const EventTree& tree, const Strategy& strategy, const AdaptedProcess& shadow_price,
                      NodeIndex node, Evaluation which) {
  require_same_tree(tree, strategy.phi0.tree_tag(), "strategy");
  require_same_tree(tree, shadow_price.tree_tag(), "shadow price");
  if (node >= tree.size()) throw PreconditionError("node index out of range");
  const Holdings h = which == Evaluation::PreTrade ? pre_trade(tree, strategy, node) : post_trade(strategy, node);
  return h.bond + h.stock * shadow_price[node];
}

AdmissibilityReport admissibility_bound(const Market& market, const Strategy& strategy, AdmissibilityMode mode) {
  const EventTree& tree = market.tree;
  require_same_tree(tree, strategy.phi0.tree_tag(), "strategy");
  auto profile = kernels::liquidation_profile_parallel(market, strategy);

  AdmissibilityReport report;
  report.mode = mode;
  report.per_node_bound.resize(tree.size());
  std::optional<NodeIndex> worst;
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    Rational need = -profile.pre[n];
    if (-profile.post[n] > need) need = -profile.post[n];
    if (mode == AdmissibilityMode::NumeraireFree) need /= 1 + market.price[n];
    if (!worst || need > report.per_node_bound[*worst]) worst = n;
    report.per_node_bound[n] = std::move(need);
  }
  report.worst_node = tree.id(*worst);
  report.minimal_M = positive_part(report.per_node_bound[*worst]);
  report.liquidation_pre = std::move(profile.pre);
  report.liquidation_post = std::move(profile.post);
  return report;
}

}  // namespace spreadlab
