#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spreadlab/market.hpp"

namespace spreadlab {

enum class MeasureMode {
  Equivalent,            // Q ~ P, encoded as Z(leaf) >= epsilon > 0
  AbsolutelyContinuous,  // Q << P, epsilon = 0
};

const char* to_string(MeasureMode mode);

/// Default equivalence floor for Z at the leaves: 10^-6.
Rational default_epsilon();

struct CpsQuery {
  Rational lambda_prime;
  Rational epsilon;
  MeasureMode mode = MeasureMode::Equivalent;

  static CpsQuery equivalent(Rational lambda_prime, Rational epsilon = default_epsilon());
  static CpsQuery absolutely_continuous(Rational lambda_prime);
};

/// Throws PreconditionError unless 0 <= lambda' < 1 and epsilon > 0 exactly
/// when the mode is Equivalent.
void validate(const CpsQuery& query);

/// A shadow price inside the spread together with the density process of a
/// pricing measure. S_tilde is meaningful only where Z > 0; off-support
/// nodes carry the ask price as a placeholder and are flagged.
struct ConsistentPriceSystem {
  AdaptedProcess shadow_price;  // S_tilde
  AdaptedProcess density;       // Z, with Z(root) = 1
  std::vector<bool> support;    // Z(n) > 0
};

/// Assembles a system from S_tilde and Z, computing the support flags.
ConsistentPriceSystem make_cps(const EventTree& tree, AdaptedProcess shadow_price, AdaptedProcess density);

struct InfeasibilityCertificate {
  /// Farkas multipliers, one per constraint row.
  std::vector<Rational> multipliers;
  std::vector<std::string> row_labels;
  /// Labels of the final phase-I basis.
  std::vector<std::string> basis;
  /// Re-checked against the constraint data independently of the solver.
  bool verified = false;
};

struct CpsResult {
  bool feasible = false;
  std::optional<ConsistentPriceSystem> cps;
  std::optional<InfeasibilityCertificate> certificate;
  std::size_t pivots = 0;
};

/// Searches for (Z, Y) with Z(root) = 1, Z and Y P-martingales,
/// (1 - lambda') S Z <= Y <= S Z node-wise and Z(leaf) >= epsilon, by exact
/// linear feasibility. The substitution Y = Z S_tilde linearizes the joint
/// search over the measure and the shadow price.
CpsResult find_cps(const Market& market, const CpsQuery& query);

/// Largest t such that some lambda'-system has Z(leaf) >= t at every leaf;
/// empty when no system exists even with Q only absolutely continuous.
std::optional<Rational> max_equivalence_margin(const Market& market, const Rational& lambda_prime);

struct CpsVerification {
  bool ok = true;
  std::vector<Diagnostic> violations;
};

/// Checks exactly: spread containment on the support, Z(root) = 1, Z >= 0,
/// Z and S_tilde Z P-martingales, and Z(leaf) >= epsilon when epsilon > 0.
CpsVerification verify_cps(const Market& market, const ConsistentPriceSystem& cps, const Rational& lambda_prime,
                           const Rational& epsilon);

struct Threshold {
  Rational value;  // smallest feasible lambda' found (1 if none below 1)
  Rational lower;  // largest infeasible lambda' probed (0 if 0 is feasible)
  bool found = false;
  std::size_t evaluations = 0;
};

/// Bisection on lambda' over [0, 1) at exact dyadic midpoints until the
/// bracket is within `resolution`. Uses Equivalent mode when epsilon > 0.
Threshold cps_threshold(const Market& market, const Rational& epsilon, const Rational& resolution);

struct BruteForceResult {
  bool feasible = false;
  Rational resolution;
  std::optional<ConsistentPriceSystem> witness;
  /// A grid path existed but the reconstructed density missed the epsilon floor.
  bool epsilon_limited = false;
};

/// Test oracle, independent of the simplex: exhaustive search over a grid of
/// shadow prices per node (spread endpoints plus the multiples of the
/// resolution that fall inside the spread) by
/// dynamic programming from the leaves, then an explicit density built node
/// by node. One-sided: "feasible" always comes with a verified witness.
/// Limited to at most 3 periods and 3 children per node.
BruteForceResult brute_force_cps(const Market& market, const CpsQuery& query, const Rational& grid_resolution);

/// Multiplies S_tilde by a constant, keeping the measure.
ConsistentPriceSystem scale_shadow_price(const EventTree& tree, const ConsistentPriceSystem& cps,
                                         const Rational& factor);

/// From a lambda'-system, the two lambda-systems ((1 - alpha) S_tilde, Q) and
/// ((1 - lambda) / (1 - alpha) S_tilde, Q). Requires lambda' < alpha < lambda
/// and (1 - alpha)(1 - lambda') >= 1 - lambda (implied by alpha <= lambda / 2).
std::pair<ConsistentPriceSystem, ConsistentPriceSystem> scale_cps(const EventTree& tree,
                                                                  const ConsistentPriceSystem& cps,
                                                                  const Rational& lambda, const Rational& alpha,
                                                                  const Rational& lambda_prime);

}  // namespace spreadlab
