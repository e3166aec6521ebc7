#include "spreadlab/strategy.hpp"

#include <algorithm>

namespace spreadlab {

Strategy::Strategy(AdaptedProcess bond, AdaptedProcess stock) : phi0(std::move(bond)), phi1(std::move(stock)) {
  if (phi0.tree_tag() != phi1.tree_tag()) throw PreconditionError("strategy accounts live on different trees");
}

Strategy Strategy::zero(const EventTree& tree) {
  return Strategy(AdaptedProcess::constant(tree, 0), AdaptedProcess::constant(tree, 0));
}

Holdings pre_trade(const EventTree& tree, const Strategy& strategy, NodeIndex node) {
  const auto p = tree.parent(node);
  if (!p) return {Rational(0), Rational(0)};
  return {strategy.phi0[*p], strategy.phi1[*p]};
}

Holdings post_trade(const Strategy& strategy, NodeIndex node) { return {strategy.phi0[node], strategy.phi1[node]}; }

TradeDecomposition decompose_trades(const EventTree& tree, const Strategy& strategy) {
  require_same_tree(tree, strategy.phi1.tree_tag(), "strategy");
  TradeDecomposition out{std::vector<Rational>(tree.size()), std::vector<Rational>(tree.size())};
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    const Rational delta = strategy.phi1[n] - pre_trade(tree, strategy, n).stock;
    out.buy[n] = positive_part(delta);
    out.sell[n] = negative_part(delta);
  }
  return out;
}

Strategy derive_bond_account(const Market& market, const std::vector<Rational>& phi1) {
  const EventTree& tree = market.tree;
  AdaptedProcess stock(tree, phi1);
  std::vector<Rational> bond(tree.size());
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    const auto p = tree.parent(n);
    const Rational before_bond = p ? bond[*p] : Rational(0);
    const Rational before_stock = p ? phi1[*p] : Rational(0);
    const Rational delta = phi1[n] - before_stock;
    const Rational& s = market.price[n];
    bond[n] = before_bond + (1 - market.lambda) * s * negative_part(delta) - s * positive_part(delta);
  }
  return Strategy(AdaptedProcess(tree, std::move(bond)), std::move(stock));
}

SelfFinancingReport check_self_financing(const Market& market, const Strategy& strategy) {
  const EventTree& tree = market.tree;
  require_same_tree(tree, strategy.phi0.tree_tag(), "strategy");
  const TradeDecomposition trades = decompose_trades(tree, strategy);
  SelfFinancingReport report{std::vector<bool>(tree.size()), std::vector<Rational>(tree.size()), true};
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    const Rational& s = market.price[n];
    const Rational cash_in = (1 - market.lambda) * s * trades.sell[n] - s * trades.buy[n];
    const Rational bond_change = strategy.phi0[n] - pre_trade(tree, strategy, n).bond;
    report.slack[n] = cash_in - bond_change;
    report.pass[n] = report.slack[n] >= 0;
    report.self_financing = report.self_financing && report.pass[n];
  }
  return report;
}

TotalVariation total_variation(const EventTree& tree, const Strategy& strategy) {
  require_same_tree(tree, strategy.phi0.tree_tag(), "strategy");
  std::vector<Rational> tv0(tree.size()), tv1(tree.size());
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    const Holdings before = pre_trade(tree, strategy, n);
    const auto p = tree.parent(n);
    tv0[n] = (p ? tv0[*p] : Rational(0)) + abs(strategy.phi0[n] - before.bond);
    tv1[n] = (p ? tv1[*p] : Rational(0)) + abs(strategy.phi1[n] - before.stock);
  }
  TotalVariation out{Rational(0), Rational(0)};
  for (NodeIndex leaf : tree.leaves()) {
    out.bond = std::max(out.bond, tv0[leaf]);
    out.stock = std::max(out.stock, tv1[leaf]);
  }
  return out;
}

}  // namespace spreadlab
