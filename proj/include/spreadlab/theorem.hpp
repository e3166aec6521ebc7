#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spreadlab/cps.hpp"
#include "spreadlab/valuation.hpp"

namespace spreadlab {

struct OssmReport {
  bool holds = true;
  std::vector<NodeId> violating;
  std::vector<Rational> drift;  // positive Q-drift at each violating node
};

/// Optional strong supermartingale test under Q: on a finite tree the
/// inequality E_Q[X_tau | F_sigma] <= X_sigma for all stopping times
/// sigma <= tau reduces to a nonpositive one-step drift at every internal
/// node of the support of Q.
OssmReport check_ossm(const EventTree& tree, const AdaptedProcess& x, const AdaptedProcess& density);

/// X = M - A with M a Q-martingale and A predictable, nondecreasing, A(root) = 0.
struct Decomposition {
  AdaptedProcess martingale;
  PredictableProcess compensator;
};

/// Unique discrete Doob decomposition. Off the support of Q the compensator
/// is held flat. Throws PreconditionError if X has positive drift somewhere
/// in the support.
Decomposition doob_decompose(const EventTree& tree, const AdaptedProcess& x, const AdaptedProcess& density);

/// Shadow value split into a cumulative trading-cost term and a gains term:
///   cost(n)      = cost(p) + (phi0(n) - phi0(p)) + S_tilde(n) (phi1(n) - phi1(p))
///   transform(n) = transform(p) + phi1(p) (S_tilde(n) - S_tilde(p))
/// with the root measured from the (0, 0) endowment, so that
/// value(n) = phi0(n) + phi1(n) S_tilde(n) = cost(n) + transform(n).
struct ShadowDecomposition {
  AdaptedProcess cost;
  AdaptedProcess transform;
  AdaptedProcess value;
  /// Nodes whose cost increment is positive; empty for self-financing
  /// strategies and shadow prices inside the spread.
  std::vector<Diagnostic> violations;
};

ShadowDecomposition shadow_decomposition(const Market& market, const Strategy& strategy,
                                         const ConsistentPriceSystem& cps);

enum class WitnessKind {
  APlus,   // long (or flat) stock position below -x
  AMinus,  // short (or flat) stock position below -x
  Gains,   // frictionless wealth x + (H . S) below zero
};

const char* to_string(WitnessKind kind);

struct Witness {
  NodeId node;
  WitnessKind kind = WitnessKind::APlus;
  Rational value;
};

struct HypothesisPoint {
  Rational lambda_prime;
  bool feasible = false;
};

enum class VerdictStatus { Holds, ConclusionViolated, HypothesisUnmet, PreconditionFailed };

const char* to_string(VerdictStatus status);

struct TheoremVerdict {
  /// Conclusion: the node-wise bound holds. Equivalent to !witness.
  bool holds = true;
  Rational x;
  std::optional<Witness> witness;
  std::vector<HypothesisPoint> hypothesis;
  bool hypothesis_met = true;
  std::vector<std::string> precondition_failures;
  AdmissibilityMode mode = AdmissibilityMode::NumeraireBased;
  /// The value the conclusion is checked against, per node.
  std::vector<Rational> values;

  /// A violated conclusion only contradicts the theorem when its
  /// hypotheses and preconditions hold.
  VerdictStatus status() const;
};

/// lambda * 2^-k for k = 0..10.
std::vector<Rational> default_lambda_grid(const Rational& lambda);

/// Terminal bound V_liq >= -x at the leaves (final holdings) and CPS
/// existence at every lambda' of the grid are the hypotheses; the
/// conclusion is V_liq >= -x for the pre-trade holdings at every node.
/// A failing node is classified A+ (phi1 >= 0) or A- (phi1 < 0).
TheoremVerdict check_admissibility_theorem(const Market& market, const Strategy& strategy, const Rational& x,
                                           std::span<const Rational> lambda_grid,
                                           AdmissibilityMode mode = AdmissibilityMode::NumeraireBased,
                                           const Rational& epsilon = default_epsilon());

/// Gains x + sum H(m) (S(m) - S(parent m)) along the root path, H
/// predictable. Requires lambda = 0; the hypothesis is an equivalent
/// martingale measure (a CPS at lambda' = 0).
std::vector<Rational> frictionless_wealth(const Market& market, const PredictableProcess& h, const Rational& x);
TheoremVerdict frictionless_check(const Market& market, const PredictableProcess& h, const Rational& x,
                                  const Rational& epsilon = default_epsilon());

/// Nodes at `depth` whose pre-trade holdings fall into the witness set at
/// level alpha: A+ = {phi1 >= 0, phi0 + phi1 (1-lambda)/(1-alpha) S < -x},
/// A- = {phi1 <= 0, phi0 + phi1 (1-alpha)^2 S < -x}.
std::vector<NodeIndex> witness_set(const Market& market, const Strategy& strategy, const Rational& x,
                                   std::size_t depth, WitnessKind kind, const Rational& alpha);

/// Step-by-step replay of the contradiction argument on a witness set A:
///   E_Q[V_liq_T | A] <= E_Q[scaled shadow value at T | A]
///                    <= E_Q[scaled shadow value at tau | A]
///                    <= E_Q[modified liquidation value at tau | A] < -x.
struct ProofReplay {
  std::vector<NodeId> witness_nodes;
  Rational witness_probability;  // Q(A)
  bool scaled_system_valid = false;
  Rational terminal_liquidation;
  Rational terminal_scaled;
  Rational stopped_scaled;
  Rational stopped_modified;
  bool step_dominance = false;      // first inequality
  bool step_supermartingale = false;
  bool step_price_bound = false;
  bool contradiction = false;       // every step holds and the chain ends below -x
};

ProofReplay replay_admissibility_proof(const Market& market, const Strategy& strategy, const Rational& x,
                                       std::size_t depth, WitnessKind kind, const Rational& alpha,
                                       const ConsistentPriceSystem& cps);

}  // namespace spreadlab
