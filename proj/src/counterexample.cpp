#include "spreadlab/counterexample.hpp"

namespace spreadlab {

CounterexampleReport deterministic_counterexample(const Rational& lambda, std::size_t steps) {
  if (lambda <= 0 || lambda >= 1) throw PreconditionError("deterministic counter-example requires 0 < λ < 1");
  if (steps < 2 || steps % 2 != 0) throw PreconditionError("steps must be an even integer ≥ 2");

  std::vector<Rational> times, price;
  std::vector<NodeSpec> specs;
  for (std::size_t k = 0; k <= steps; ++k) {
    const Rational t(static_cast<long>(k), static_cast<long>(steps));
    times.push_back(t);
    price.push_back(t <= Rational(1, 2) ? Rational(1 - 2 * t * lambda) : Rational(1 - 2 * (1 - t) * lambda));
    specs.push_back({NodeId{k}, k == 0 ? std::nullopt : std::optional<NodeId>(NodeId{k - 1}), Rational(1)});
  }
  EventTree tree = EventTree::create(times, specs);
  Market market = make_market(tree, price, lambda);
  Strategy strategy = derive_bond_account(market, std::vector<Rational>(tree.size(), 1 / lambda));
  ConsistentPriceSystem cps =
      make_cps(tree, AdaptedProcess::constant(tree, 1 - lambda), AdaptedProcess::constant(tree, 1));

  CounterexampleReport report{std::move(market), std::move(strategy), std::move(cps), lambda, lambda,
                              Rational(-1),      Rational(-2 + lambda), NodeId{steps / 2},
                              std::nullopt,      std::nullopt,          {},
                              {}};
  report.labels = {{"start", NodeId{0}}, {"dip", NodeId{steps / 2}}, {"end", NodeId{steps}}};
  report.branch_probabilities = {{"path", Rational(1)}};
  return report;
}

Rational distressed_value(const Rational& lambda, const Rational& lambda_prime, const Rational& bond_wealth) {
  return bond_wealth - (bond_wealth + 1) * (1 + lambda_prime * (1 / lambda - 1));
}

CounterexampleReport stochastic_counterexample(const Rational& lambda, const Rational& lambda_prime,
                                               const Rational& m_tilde, SaleConvention sale) {
  if (!(0 < lambda_prime && lambda_prime <= lambda && lambda < 1)) {
    throw PreconditionError("stochastic counter-example requires 0 < λ' ≤ λ < 1");
  }
  if (m_tilde <= 1) throw PreconditionError("stochastic counter-example requires M~ > 1");

  const Rational p_up = 1 / (2 * m_tilde - 1);
  const Rational half(1, 2);
  const Rational high = 2 * m_tilde - 1;
  // ids: 0 root | 1 A+, 2 A- (t=1/8) | 3 A++, 4 A+-, 5 A- (t=1/4) | 6, 7, 8 (t=1/2) | 9, 10, 11 (t=1)
  const std::vector<NodeSpec> specs{
      {NodeId{0}, std::nullopt, Rational(1)},  {NodeId{1}, NodeId{0}, p_up},       {NodeId{2}, NodeId{0}, 1 - p_up},
      {NodeId{3}, NodeId{1}, half},            {NodeId{4}, NodeId{1}, half},       {NodeId{5}, NodeId{2}, Rational(1)},
      {NodeId{6}, NodeId{3}, Rational(1)},     {NodeId{7}, NodeId{4}, Rational(1)}, {NodeId{8}, NodeId{5}, Rational(1)},
      {NodeId{9}, NodeId{6}, Rational(1)},     {NodeId{10}, NodeId{7}, Rational(1)}, {NodeId{11}, NodeId{8}, Rational(1)},
  };
  EventTree tree = EventTree::create({Rational(0), Rational(1, 8), Rational(1, 4), half, Rational(1)}, specs);
  auto at = [&](std::uint64_t id) { return tree.index(NodeId{id}); };

  std::vector<Rational> price(tree.size());
  const std::vector<std::pair<std::uint64_t, Rational>> quoted{
      {0, Rational(1)}, {1, m_tilde}, {2, half},          {3, high}, {4, Rational(1)}, {5, half},
      {6, high},        {7, 1 - lambda_prime}, {8, half}, {9, high}, {10, Rational(1)}, {11, half}};
  for (const auto& [id, s] : quoted) price[at(id)] = s;
  Market market = make_market(tree, price, lambda);

  const Rational sale_factor = sale == SaleConvention::SelfFinancing ? Rational(1 - lambda) : Rational(1 - lambda_prime);
  const Rational bond_wealth = -1 + m_tilde * sale_factor;
  const Rational leveraged = (bond_wealth + 1) / lambda;
  const Rational on_a_minus = -1 + (1 - lambda) / 2;

  std::vector<Rational> phi0(tree.size()), phi1(tree.size());
  auto hold = [&](std::uint64_t id, Rational bond, Rational stock) {
    phi0[at(id)] = std::move(bond);
    phi1[at(id)] = std::move(stock);
  };
  hold(0, Rational(-1), Rational(1));
  hold(1, bond_wealth, 0);
  hold(2, on_a_minus, 0);
  for (std::uint64_t id : {3u, 6u, 9u}) hold(id, bond_wealth, 0);
  for (std::uint64_t id : {4u, 7u, 10u}) hold(id, bond_wealth - leveraged, leveraged);
  for (std::uint64_t id : {5u, 8u, 11u}) hold(id, on_a_minus, 0);
  Strategy strategy(AdaptedProcess(tree, std::move(phi0)), AdaptedProcess(tree, std::move(phi1)));

  // S_tilde = (1 - lambda') S stopped at t = 1/4, under Q = P.
  std::vector<Rational> shadow(tree.size());
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    NodeIndex anchor = n;
    while (tree.depth(anchor) > 2) anchor = *tree.parent(anchor);
    shadow[n] = (1 - lambda_prime) * market.price[anchor];
  }
  ConsistentPriceSystem cps =
      make_cps(tree, AdaptedProcess(tree, std::move(shadow)), AdaptedProcess::constant(tree, 1));

  CounterexampleReport report{std::move(market),
                              std::move(strategy),
                              std::move(cps),
                              lambda,
                              lambda_prime,
                              Rational(-1),
                              distressed_value(lambda, lambda_prime, bond_wealth),
                              NodeId{7},
                              m_tilde,
                              bond_wealth,
                              {},
                              {}};
  report.sale = sale;
  report.branch_probabilities = {{"A+", p_up}, {"A-", 1 - p_up}, {"A++|A+", half}, {"A+-|A+", half}};
  report.labels = {{"A+", NodeId{1}}, {"A-", NodeId{2}}, {"A++", NodeId{3}}, {"A+-", NodeId{4}},
                   {"A+- (t=1/2)", NodeId{7}}, {"A+- (t=1)", NodeId{10}}};
  return report;
}

Rational m_tilde_for_loss(const Rational& loss, const Rational& lambda, const Rational& lambda_prime) {
  if (loss <= 1) throw PreconditionError("the loss level C must exceed 1");
  Rational m_tilde = 2;
  for (int i = 0; i < 200; ++i, m_tilde *= 2) {
    if (distressed_value(lambda, lambda_prime, -1 + m_tilde * (1 - lambda)) <= -loss) return m_tilde;
  }
  throw PreconditionError("no M~ up to 2^200 reaches the requested loss");
}

}  // namespace spreadlab
