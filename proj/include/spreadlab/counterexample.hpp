#pragma once

#include <map>
#include <optional>
#include <string>

#include "spreadlab/cps.hpp"
#include "spreadlab/strategy.hpp"

namespace spreadlab {

/// How the stock bought at time 0 is sold on A+ at t = 1/8.
enum class SaleConvention {
  /// At the bid (1 - lambda) S: the strategy stays lambda-self-financing.
  SelfFinancing,
  /// At (1 - lambda') S.
  /// Breaks lambda-self-financing whenever lambda' < lambda.
  Literal,
};

/// A generated market where terminal liquidation values are bounded below
/// by -1 while an intermediate value is far lower, together with the
/// lambda'-consistent price system that makes the example valid.
struct CounterexampleReport {
  Market market;
  Strategy strategy;
  ConsistentPriceSystem cps_witness;
  Rational lambda;
  Rational lambda_prime;
  Rational expected_terminal_bound;  // -1
  Rational expected_midtime_value;   // at t = 1/2 on the distressed path
  NodeId midtime_node;
  std::optional<Rational> m_tilde;
  std::optional<Rational> bond_after_sale;  // M
  std::map<std::string, Rational> branch_probabilities;
  std::map<std::string, NodeId> labels;
  SaleConvention sale = SaleConvention::SelfFinancing;
};

/// Single-branch tree on t = k / steps with S = 1 - 2 t lambda up to 1/2 and
/// S = 1 - 2 (1 - t) lambda afterwards. The strategy buys 1/lambda shares at
/// the ask at time 0, financed by borrowing, and holds.
CounterexampleReport deterministic_counterexample(const Rational& lambda, std::size_t steps = 2);

/// Splitting tree on t = 0, 1/8, 1/4, 1/2, 1:
///   root -> A+ (prob 1/(2 M~ - 1), S = M~), A- (S = 1/2)
///   A+   -> A++ (1/2, S = 2 M~ - 1), A+- (1/2, S = 1)
/// On A+- the price dips to 1 - lambda' at t = 1/2 and recovers to 1; every
/// other path stays flat after 1/4. The strategy buys one share at time 0,
/// sells at 1/8, and on A+- re-enters with (M - (M+1)/lambda, (M+1)/lambda).
CounterexampleReport stochastic_counterexample(const Rational& lambda, const Rational& lambda_prime,
                                               const Rational& m_tilde,
                                               SaleConvention sale = SaleConvention::SelfFinancing);

/// M - (M + 1) [1 + lambda' (1/lambda - 1)]: the liquidation value at t = 1/2
/// on A+- for bond wealth M.
Rational distressed_value(const Rational& lambda, const Rational& lambda_prime, const Rational& bond_wealth);

/// Smallest M~ in {2, 4, 8, ...} whose stochastic instance has a mid-time
/// liquidation value <= -C.
Rational m_tilde_for_loss(const Rational& loss, const Rational& lambda, const Rational& lambda_prime);

}  // namespace spreadlab
