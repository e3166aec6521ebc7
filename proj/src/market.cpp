#include "spreadlab/market.hpp"

namespace spreadlab {

Market::Market(EventTree t, AdaptedProcess s, Rational l) : tree(std::move(t)), price(std::move(s)), lambda(std::move(l)) {
  require_same_tree(tree, price.tree_tag(), "price process");
}

std::vector<Diagnostic> validate_market(const Market& market) {
  std::vector<Diagnostic> issues;
  for (NodeIndex n = 0; n < market.tree.size(); ++n) {
    if (market.price[n] <= 0) {
      issues.push_back({market.tree.id(n), "price must be strictly positive, got " + to_string(market.price[n])});
    }
  }
  if (market.lambda < 0 || market.lambda >= 1) {
    issues.push_back({std::nullopt, "lambda must satisfy 0 ≤ λ < 1 (got " + to_string(market.lambda) + ")"});
  }
  return issues;
}

Market make_market(EventTree tree, std::vector<Rational> price, Rational lambda) {
  AdaptedProcess s(tree, std::move(price));
  Market market(std::move(tree), std::move(s), std::move(lambda));
  auto issues = validate_market(market);
  if (!issues.empty()) throw DiagnosticError(std::move(issues));
  return market;
}

Quote bid_ask(const Market& market, NodeId node) { return bid_ask(market, market.tree.index(node)); }

Quote bid_ask(const Market& market, NodeIndex node) {
  if (node >= market.tree.size()) throw PreconditionError("node index out of range");
  const Rational& s = market.price[node];
  return {(1 - market.lambda) * s, s};
}

}  // namespace spreadlab
