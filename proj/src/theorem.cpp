#include "spreadlab/theorem.hpp"

#include "spreadlab/kernels.hpp"

namespace spreadlab {

OssmReport check_ossm(const EventTree& tree, const AdaptedProcess& x, const AdaptedProcess& density) {
  require_same_tree(tree, x.tree_tag(), "process");
  auto issues = validate_density(tree, density);
  if (!issues.empty()) throw PreconditionError("invalid density: " + format(issues));
  OssmReport report;
  const auto drift = kernels::drift_parallel(tree, x, density);
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    if (drift[n] && *drift[n] > 0) {
      report.holds = false;
      report.violating.push_back(tree.id(n));
      report.drift.push_back(*drift[n]);
    }
  }
  return report;
}

Decomposition doob_decompose(const EventTree& tree, const AdaptedProcess& x, const AdaptedProcess& density) {
  const OssmReport ossm = check_ossm(tree, x, density);
  if (!ossm.holds) {
    throw PreconditionError("not a Q-supermartingale: positive drift " + to_string(ossm.drift.front()) + " at node " +
                            std::to_string(ossm.violating.front().value));
  }
  const auto drift = kernels::drift_parallel(tree, x, density);
  std::vector<Rational> a(tree.size()), m(tree.size());
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    m[n] = x[n] + a[n];
    if (tree.is_leaf(n)) continue;
    const Rational step = drift[n] ? Rational(-*drift[n]) : Rational(0);
    for (NodeIndex c : tree.children(n)) a[c] = a[n] + step;
  }
  return {AdaptedProcess(tree, std::move(m)), PredictableProcess(tree, std::move(a))};
}

ShadowDecomposition shadow_decomposition(const Market& market, const Strategy& strategy,
                                         const ConsistentPriceSystem& cps) {
  const EventTree& tree = market.tree;
  require_same_tree(tree, strategy.phi0.tree_tag(), "strategy");
  require_same_tree(tree, cps.shadow_price.tree_tag(), "consistent price system");
  const auto& st = cps.shadow_price;
  std::vector<Rational> cost(tree.size()), transform(tree.size()), value(tree.size());
  std::vector<Diagnostic> violations;
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    const Holdings before = pre_trade(tree, strategy, n);
    const auto p = tree.parent(n);
    const Rational step = (strategy.phi0[n] - before.bond) + st[n] * (strategy.phi1[n] - before.stock);
    if (step > 0) violations.push_back({tree.id(n), "trading at the shadow price gains " + to_string(step)});
    cost[n] = (p ? cost[*p] : Rational(0)) + step;
    transform[n] = p ? Rational(transform[*p] + before.stock * (st[n] - st[*p])) : Rational(0);
    value[n] = strategy.phi0[n] + strategy.phi1[n] * st[n];
  }
  return {AdaptedProcess(tree, std::move(cost)), AdaptedProcess(tree, std::move(transform)),
          AdaptedProcess(tree, std::move(value)), std::move(violations)};
}

const char* to_string(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::APlus:
      return "A+";
    case WitnessKind::AMinus:
      return "A-";
    case WitnessKind::Gains:
      return "gains";
  }
  return "?";
}

const char* to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Holds:
      return "holds";
    case VerdictStatus::ConclusionViolated:
      return "conclusion_violated";
    case VerdictStatus::HypothesisUnmet:
      return "hypothesis_unmet";
    case VerdictStatus::PreconditionFailed:
      return "precondition_failed";
  }
  return "?";
}

VerdictStatus TheoremVerdict::status() const {
  if (!precondition_failures.empty()) return VerdictStatus::PreconditionFailed;
  if (!hypothesis_met) return VerdictStatus::HypothesisUnmet;
  return holds ? VerdictStatus::Holds : VerdictStatus::ConclusionViolated;
}

std::vector<Rational> default_lambda_grid(const Rational& lambda) {
  std::vector<Rational> grid;
  for (unsigned k = 0; k <= 10; ++k) grid.push_back(lambda * pow2_inverse(k));
  return grid;
}

namespace {

void scan_hypothesis(const Market& market, std::span<const Rational> grid, const Rational& epsilon,
                     TheoremVerdict& verdict) {
  std::vector<CpsQuery> queries;
  for (const auto& lp : grid) queries.push_back(CpsQuery::equivalent(lp, epsilon));
  const auto results = kernels::cps_scan_parallel(market, queries);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    verdict.hypothesis.push_back({grid[i], results[i].feasible});
    verdict.hypothesis_met = verdict.hypothesis_met && results[i].feasible;
  }
}

}  // namespace

TheoremVerdict check_admissibility_theorem(const Market& market, const Strategy& strategy, const Rational& x,
                                           std::span<const Rational> lambda_grid, AdmissibilityMode mode,
                                           const Rational& epsilon) {
  const EventTree& tree = market.tree;
  require_same_tree(tree, strategy.phi0.tree_tag(), "strategy");
  TheoremVerdict verdict;
  verdict.x = x;
  verdict.mode = mode;

  if (!check_self_financing(market, strategy).self_financing) {
    verdict.precondition_failures.push_back("strategy is not self-financing");
  }
  // Every strategy on a finite tree is admissible in both senses; the bound
  // is computed so that a malformed strategy still surfaces here.
  (void)admissibility_bound(market, strategy, mode);

  auto profile = kernels::liquidation_profile_parallel(market, strategy);
  for (NodeIndex leaf : tree.leaves()) {
    if (profile.post[leaf] < -x) {
      verdict.precondition_failures.push_back("terminal liquidation value " + to_string(profile.post[leaf]) +
                                              " < -x at node " + std::to_string(tree.id(leaf).value));
    }
  }
  scan_hypothesis(market, lambda_grid, epsilon, verdict);

  std::optional<NodeIndex> worst;
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    if (profile.pre[n] < -x && (!worst || profile.pre[n] < profile.pre[*worst])) worst = n;
  }
  if (worst) {
    const Holdings before = pre_trade(tree, strategy, *worst);
    verdict.holds = false;
    verdict.witness = Witness{tree.id(*worst), before.stock >= 0 ? WitnessKind::APlus : WitnessKind::AMinus,
                              profile.pre[*worst]};
  }
  verdict.values = std::move(profile.pre);
  return verdict;
}

std::vector<Rational> frictionless_wealth(const Market& market, const PredictableProcess& h, const Rational& x) {
  const EventTree& tree = market.tree;
  require_same_tree(tree, h.tree_tag(), "integrand");
  std::vector<Rational> wealth(tree.size());
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    const auto p = tree.parent(n);
    wealth[n] = p ? Rational(wealth[*p] + h[n] * (market.price[n] - market.price[*p])) : x;
  }
  return wealth;
}

TheoremVerdict frictionless_check(const Market& market, const PredictableProcess& h, const Rational& x,
                                  const Rational& epsilon) {
  if (market.lambda != 0) throw PreconditionError("frictionless check requires lambda = 0");
  const EventTree& tree = market.tree;
  TheoremVerdict verdict;
  verdict.x = x;
  verdict.values = frictionless_wealth(market, h, x);
  for (NodeIndex leaf : tree.leaves()) {
    if (verdict.values[leaf] < 0) {
      verdict.precondition_failures.push_back("terminal wealth " + to_string(verdict.values[leaf]) +
                                              " < 0 at node " + std::to_string(tree.id(leaf).value));
    }
  }
  const Rational zero = 0;
  scan_hypothesis(market, std::span<const Rational>(&zero, 1), epsilon, verdict);
  std::optional<NodeIndex> worst;
  for (NodeIndex n = 0; n < tree.size(); ++n) {
    if (verdict.values[n] < 0 && (!worst || verdict.values[n] < verdict.values[*worst])) worst = n;
  }
  if (worst) {
    verdict.holds = false;
    verdict.witness = Witness{tree.id(*worst), WitnessKind::Gains, verdict.values[*worst]};
  }
  return verdict;
}

namespace {

Rational modified_factor(const Market& market, WitnessKind kind, const Rational& alpha) {
  if (kind == WitnessKind::APlus) return (1 - market.lambda) / (1 - alpha);
  if (kind == WitnessKind::AMinus) return (1 - alpha) * (1 - alpha);
  throw PreconditionError("witness sets are defined for A+ and A- only");
}

}  // namespace

std::vector<NodeIndex> witness_set(const Market& market, const Strategy& strategy, const Rational& x,
                                   std::size_t depth, WitnessKind kind, const Rational& alpha) {
  const Rational factor = modified_factor(market, kind, alpha);
  std::vector<NodeIndex> out;
  for (NodeIndex n : market.tree.level(depth)) {
    const Holdings h = pre_trade(market.tree, strategy, n);
    const bool sign_ok = kind == WitnessKind::APlus ? h.stock >= 0 : h.stock <= 0;
    if (sign_ok && h.bond + h.stock * factor * market.price[n] < -x) out.push_back(n);
  }
  return out;
}

ProofReplay replay_admissibility_proof(const Market& market, const Strategy& strategy, const Rational& x,
                                       std::size_t depth, WitnessKind kind, const Rational& alpha,
                                       const ConsistentPriceSystem& cps) {
  const EventTree& tree = market.tree;
  const Rational price_factor = modified_factor(market, kind, alpha);
  const Rational shadow_factor = kind == WitnessKind::APlus ? price_factor : Rational(1 - alpha);
  const ConsistentPriceSystem scaled = scale_shadow_price(tree, cps, shadow_factor);

  ProofReplay out;
  out.scaled_system_valid = verify_cps(market, scaled, market.lambda, Rational(0)).ok;
  const auto set = witness_set(market, strategy, x, depth, kind, alpha);
  for (NodeIndex a : set) out.witness_nodes.push_back(tree.id(a));

  const auto& z = cps.density;
  Rational mass = 0, terminal_liq = 0, terminal_scaled = 0, stopped_scaled = 0, stopped_modified = 0;
  for (NodeIndex a : set) {
    const Rational qa = tree.probability(a) * z[a];
    if (qa == 0) continue;
    mass += qa;
    const Holdings h = pre_trade(tree, strategy, a);
    stopped_scaled += qa * (h.bond + h.stock * scaled.shadow_price[a]);
    stopped_modified += qa * (h.bond + h.stock * price_factor * market.price[a]);
    for (NodeIndex leaf : tree.leaves()) {
      if (!tree.is_ancestor(a, leaf)) continue;
      const Rational ql = tree.probability(leaf) * z[leaf];
      terminal_liq += ql * liquidation_value(market, strategy.phi0[leaf], strategy.phi1[leaf], leaf);
      terminal_scaled += ql * (strategy.phi0[leaf] + strategy.phi1[leaf] * scaled.shadow_price[leaf]);
    }
  }
  out.witness_probability = mass;
  if (mass == 0) return out;
  out.terminal_liquidation = terminal_liq / mass;
  out.terminal_scaled = terminal_scaled / mass;
  out.stopped_scaled = stopped_scaled / mass;
  out.stopped_modified = stopped_modified / mass;
  out.step_dominance = out.terminal_liquidation <= out.terminal_scaled;
  out.step_supermartingale = out.terminal_scaled <= out.stopped_scaled;
  out.step_price_bound = out.stopped_scaled <= out.stopped_modified;
  out.contradiction = out.scaled_system_valid && out.step_dominance && out.step_supermartingale &&
                      out.step_price_bound && out.stopped_modified < -x && out.terminal_liquidation < -x;
  return out;
}

}  // namespace spreadlab
