#pragma once
// Random instance generators and brute-force reference computations shared
// by the unit tests and the acceptance binary. Nothing here calls the code
// under test except to build inputs.

#include <cstdint>
#include <random>
#include <vector>

#include "spreadlab/strategy.hpp"

namespace spreadlab::testing {

using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi].
int uniform(Rng& rng, int lo, int hi);

/// Random tree with exactly `periods` steps and 1..max_children children per
/// internal node; conditional probabilities are normalized integer weights.
/// When `shuffle_ids` is set, non-root ids are a random permutation of
/// sparse integers instead of the breadth-first numbering.
EventTree random_tree(Rng& rng, std::size_t periods, std::size_t max_children, bool shuffle_ids = false);

/// Prices k/4 with k in 1..16.
std::vector<Rational> random_prices(Rng& rng, const EventTree& tree);

Market random_market(Rng& rng, std::size_t periods, std::size_t max_children, const Rational& lambda);

/// Leaf prices k/4, every other price the P-average of its children.
Market martingale_market(Rng& rng, std::size_t periods, std::size_t max_children, const Rational& lambda);

/// Recombining-free binomial tree with S(child) = S (1 + u) or S (1 - d) and
/// the up-probability d / (u + d) that makes S a P-martingale.
Market binomial_martingale_market(Rng& rng, std::size_t periods, const Rational& lambda);

/// A martingale market whose prices are then raised by a node-wise factor in
/// [1, 1/(1 - lambda')], so that the martingale stays inside every
/// lambda'-spread.
Market market_with_cps(Rng& rng, std::size_t periods, std::size_t max_children, const Rational& lambda,
                       const Rational& lambda_prime);

/// Share holdings in {-2, -3/2, ..., 2}, repeating the parent's value with
/// probability 1/3.
std::vector<Rational> random_phi1(Rng& rng, const EventTree& tree);

/// derive_bond_account on random_phi1; with `waste`, the bond account is
/// additionally lowered on random subtrees (money thrown away).
Strategy random_strategy(Rng& rng, const Market& market, bool waste = false);

/// Sibling-constant integrand with values in [-bound, bound].
std::vector<Rational> random_predictable(Rng& rng, const EventTree& tree, int bound);

// ---- reference computations ----

/// E_Q[X at depth h | n] by enumerating the leaves below n.
Rational leaf_enumeration_expectation(const EventTree& tree, const std::vector<Rational>& x,
                                      const std::vector<Rational>& density, NodeIndex node, std::size_t horizon);

/// Every stopping time of the tree, as the node it stops at on each leaf
/// path (one entry per leaf). Only for small trees.
std::vector<std::vector<NodeIndex>> all_stopping_times(const EventTree& tree);

/// E_Q[X_tau | F_sigma] <= X_sigma for every pair sigma <= tau, checked
/// path by path. Nodes with zero density are skipped.
bool optional_strong_supermartingale_by_enumeration(const EventTree& tree, const std::vector<Rational>& x,
                                                    const std::vector<Rational>& density);

/// The two cash inequalities of the bid-ask model, without the canonical
/// split: d phi0 <= -S d phi1 when buying and d phi0 <= -(1-lambda) S d phi1
/// when selling, i.e. both d phi0 + S d phi1 <= 0 and
/// d phi0 + (1-lambda) S d phi1 <= 0.
bool self_financing_two_inequalities(const Market& market, const Strategy& strategy, NodeIndex node);

}  // namespace spreadlab::testing
