#include <gtest/gtest.h>

#include "spreadlab/counterexample.hpp"
#include "support.hpp"

namespace spreadlab {
namespace {

using testing::Rng;

Rational q(const char* text) { return parse_rational(text); }

EventTree two_children(const Rational& a, const Rational& b) {
  return EventTree::create({Rational(0), Rational(1)}, {{NodeId{0}, std::nullopt, Rational(1)},
                                                        {NodeId{1}, NodeId{0}, a},
                                                        {NodeId{2}, NodeId{0}, b}});
}

std::string diagnostics_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DiagnosticError& e) {
    return e.what();
  }
  return "";
}

TEST(EventTree, SingleNodeTreeIsALeafWithProbabilityOne) {
  const auto tree = EventTree::create({Rational(0)}, {{NodeId{0}, std::nullopt, Rational(1)}});
  EXPECT_EQ(tree.size(), 1u);
  EXPECT_EQ(tree.horizon(), 0u);
  ASSERT_EQ(tree.leaves().size(), 1u);
  EXPECT_EQ(tree.probability(tree.leaves()[0]), 1);
}

TEST(EventTree, SymmetricSplit) {
  const auto tree = two_children(q("1/2"), q("1/2"));
  EXPECT_EQ(tree.children(EventTree::root()).size(), 2u);
  EXPECT_EQ(tree.probability(tree.index(NodeId{1})), q("1/2"));
}

TEST(EventTree, ProbabilitiesMustSumToOne) {
  const auto message = diagnostics_of([] { two_children(q("1/2"), q("1/3")); });
  EXPECT_NE(message.find("probabilities sum to 5/6 ≠ 1"), std::string::npos) << message;
  EXPECT_NE(message.find("node 0"), std::string::npos) << message;
}

TEST(EventTree, EveryStructuralErrorNamesItsNode) {
  const std::vector<Rational> t{Rational(0), Rational(1)};
  EXPECT_NE(diagnostics_of([&] {
              EventTree::create(t, {{NodeId{0}, std::nullopt, Rational(1)}, {NodeId{1}, NodeId{0}, Rational(0)}});
            }).find("node 1: nonpositive probability"),
            std::string::npos);
  EXPECT_NE(diagnostics_of([&] {
              EventTree::create(t, {{NodeId{0}, std::nullopt, Rational(1)},
                                    {NodeId{1}, NodeId{0}, Rational(1)},
                                    {NodeId{2}, NodeId{9}, Rational(1)}});
            }).find("node 2: orphan"),
            std::string::npos);
  EXPECT_NE(diagnostics_of([&] {
              EventTree::create({Rational(0), Rational(1), Rational(2)},
                                {{NodeId{0}, std::nullopt, Rational(1)},
                                 {NodeId{1}, NodeId{0}, q("1/2")},
                                 {NodeId{2}, NodeId{0}, q("1/2")},
                                 {NodeId{3}, NodeId{1}, Rational(1)}});
            }).find("node 2: ragged leaf depth"),
            std::string::npos);
  EXPECT_NE(diagnostics_of([&] {
              EventTree::create(t, {{NodeId{0}, std::nullopt, Rational(1)},
                                    {NodeId{1}, NodeId{0}, Rational(1)},
                                    {NodeId{1}, NodeId{0}, Rational(1)}});
            }).find("node 1: duplicate node id"),
            std::string::npos);
  EXPECT_NE(diagnostics_of([&] {
              EventTree::create({Rational(0)}, {{NodeId{3}, std::nullopt, Rational(1)}});
            }).find("root must have id 0"),
            std::string::npos);
  EXPECT_NE(diagnostics_of([&] {
              EventTree::create({Rational(1), Rational(1)}, {{NodeId{0}, std::nullopt, Rational(1)},
                                                             {NodeId{1}, NodeId{0}, Rational(1)}});
            }).find("strictly increasing"),
            std::string::npos);
}

TEST(EventTree, CycleIsReportedAsUnreachable) {
  const auto message = diagnostics_of([] {
    EventTree::create({Rational(0), Rational(1)}, {{NodeId{0}, std::nullopt, Rational(1)},
                                                   {NodeId{1}, NodeId{0}, Rational(1)},
                                                   {NodeId{2}, NodeId{3}, Rational(1)},
                                                   {NodeId{3}, NodeId{2}, Rational(1)}});
  });
  EXPECT_NE(message.find("not reachable"), std::string::npos) << message;
}

TEST(EventTree, DenseOrderPutsParentsFirstAndLeafProbabilitiesSumToOne) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto tree = testing::random_tree(rng, 1 + trial % 4, 3, true);
    Rational total = 0;
    for (NodeIndex leaf : tree.leaves()) total += tree.probability(leaf);
    EXPECT_EQ(total, 1);
    for (NodeIndex n = 1; n < tree.size(); ++n) {
      ASSERT_TRUE(tree.parent(n));
      EXPECT_LT(*tree.parent(n), n);
      EXPECT_EQ(tree.depth(n), tree.depth(*tree.parent(n)) + 1);
      EXPECT_EQ(tree.index(tree.id(n)), n);
    }
  }
}

TEST(EventTree, UnknownNodeIsRejected) {
  const auto tree = two_children(q("1/2"), q("1/2"));
  EXPECT_THROW(tree.index(NodeId{5}), PreconditionError);
  EXPECT_FALSE(tree.contains(NodeId{5}));
}

TEST(ConditionalExpectation, IdentityOnOneNode) {
  const auto tree = EventTree::create({Rational(0)}, {{NodeId{0}, std::nullopt, Rational(1)}});
  const auto one = AdaptedProcess::constant(tree, 1);
  EXPECT_EQ(conditional_expectation(tree, AdaptedProcess::constant(tree, q("7/3")), one, NodeId{0}, 0), q("7/3"));
}

TEST(ConditionalExpectation, StochasticCounterexampleTree) {
  const auto report = stochastic_counterexample(q("1/2"), q("1/4"), Rational(4));
  const auto& tree = report.market.tree;
  const auto one = AdaptedProcess::constant(tree, 1);
  EXPECT_EQ(conditional_expectation(tree, report.market.price, one, NodeId{0}, 1), 1);
  EXPECT_EQ(conditional_expectation(tree, report.market.price, one, report.labels.at("A+"), 2), 4);
}

TEST(ConditionalExpectation, MatchesLeafEnumerationAndTowerProperty) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto tree = testing::random_tree(rng, 1 + trial % 4, 3, trial % 2 == 0);
    const auto x = testing::random_prices(rng, tree);
    // A random density: a martingale built from positive leaf weights.
    std::vector<Rational> z(tree.size());
    for (NodeIndex n = tree.size(); n-- > 0;) {
      if (tree.is_leaf(n)) {
        z[n] = testing::uniform(rng, 0, 3);
      } else {
        for (NodeIndex c : tree.children(n)) z[n] += tree.cond_prob(c) * z[c];
      }
    }
    if (z[0] == 0) continue;
    const Rational root = z[0];
    for (auto& v : z) v /= root;
    const AdaptedProcess xp(tree, x), zp(tree, z);
    for (NodeIndex n = 0; n < tree.size(); ++n) {
      if (z[n] == 0) {
        EXPECT_THROW(conditional_expectation(tree, xp, zp, n, tree.horizon()), PreconditionError);
        continue;
      }
      for (std::size_t h = tree.depth(n); h <= tree.horizon(); ++h) {
        const Rational direct = conditional_expectation(tree, xp, zp, n, h);
        EXPECT_EQ(direct, testing::leaf_enumeration_expectation(tree, x, z, n, h));
        if (h > tree.depth(n)) {
          std::vector<Rational> inner(tree.size());
          for (NodeIndex m : tree.level(h - 1)) {
            if (tree.is_ancestor(n, m) && z[m] > 0) inner[m] = conditional_expectation(tree, xp, zp, m, h);
          }
          EXPECT_EQ(direct, conditional_expectation(tree, AdaptedProcess(tree, inner), zp, n, h - 1));
        }
      }
    }
  }
}

TEST(ConditionalExpectation, RejectsForeignProcessAndBadHorizon) {
  const auto a = two_children(q("1/2"), q("1/2"));
  const auto b = two_children(q("1/2"), q("1/2"));
  EXPECT_THROW(conditional_expectation(a, AdaptedProcess::constant(b, 1), AdaptedProcess::constant(a, 1),
                                       NodeId{0}, 1),
               PreconditionError);
  EXPECT_THROW(conditional_expectation(a, AdaptedProcess::constant(a, 1), AdaptedProcess::constant(a, 1),
                                       NodeId{1}, 0),
               PreconditionError);
}

TEST(OneStepDrift, ConstantProcessHasNoDrift) {
  Rng rng(2);
  const auto tree = testing::random_tree(rng, 3, 3);
  const auto drift = one_step_drift(tree, AdaptedProcess::constant(tree, q("5/2")), AdaptedProcess::constant(tree, 1));
  for (NodeIndex n = 0; n < tree.size(); ++n) EXPECT_EQ(drift[n], 0);
}

TEST(OneStepDrift, DeterministicCounterexampleShadowPriceIsAMartingale) {
  const auto report = deterministic_counterexample(q("1/2"), 4);
  const auto& tree = report.market.tree;
  const auto drift =
      one_step_drift(tree, AdaptedProcess::constant(tree, q("1/2")), AdaptedProcess::constant(tree, 1));
  for (NodeIndex n = 0; n < tree.size(); ++n) EXPECT_EQ(drift[n], 0);
}

TEST(OneStepDrift, DeterministicPathDriftsDownThenUp) {
  const auto report = deterministic_counterexample(q("1/2"), 2);
  const auto& tree = report.market.tree;
  const auto drift = one_step_drift(tree, report.market.price, AdaptedProcess::constant(tree, 1));
  EXPECT_EQ(drift[0], q("-1/2"));
  EXPECT_EQ(drift[1], q("1/2"));
  EXPECT_EQ(drift[2], 0);
}

TEST(OneStepDrift, VanishesExactlyForMartingales) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto market = testing::martingale_market(rng, 3, 3, Rational(0));
    const auto& tree = market.tree;
    const auto one = AdaptedProcess::constant(tree, 1);
    const auto drift = one_step_drift(tree, market.price, one);
    for (NodeIndex n = 0; n < tree.size(); ++n) {
      EXPECT_EQ(drift[n], 0);
      for (std::size_t h = tree.depth(n); h <= tree.horizon(); ++h) {
        EXPECT_EQ(conditional_expectation(tree, market.price, one, n, h), market.price[n]);
      }
    }
  }
}

TEST(PredictableProcess, SiblingsMustAgree) {
  const auto tree = two_children(q("1/2"), q("1/2"));
  EXPECT_NO_THROW(PredictableProcess(tree, {Rational(0), Rational(1), Rational(1)}));
  EXPECT_THROW(PredictableProcess(tree, {Rational(0), Rational(1), Rational(2)}), ValidationError);
}

TEST(Density, ValidationFindsEveryDefect) {
  const auto tree = two_children(q("1/2"), q("1/2"));
  EXPECT_TRUE(validate_density(tree, AdaptedProcess(tree, {Rational(1), Rational(2), Rational(0)})).empty());
  EXPECT_EQ(validate_density(tree, AdaptedProcess(tree, {Rational(1), Rational(3), Rational(-1)})).size(), 1u);
  EXPECT_EQ(validate_density(tree, AdaptedProcess(tree, {Rational(2), Rational(2), Rational(2)})).size(), 1u);
  EXPECT_EQ(validate_density(tree, AdaptedProcess(tree, {Rational(1), Rational(1), Rational(2)})).size(), 1u);
}

}  // namespace
}  // namespace spreadlab
