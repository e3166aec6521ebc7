#include <gtest/gtest.h>

#include "spreadlab/counterexample.hpp"
#include "spreadlab/valuation.hpp"
#include "support.hpp"

namespace spreadlab {
namespace {

Rational q(const char* text) { return parse_rational(text); }

Market one_node(const Rational& s, const Rational& lambda) {
  auto tree = EventTree::create({Rational(0)}, {{NodeId{0}, std::nullopt, Rational(1)}});
  return make_market(tree, {s}, lambda);
}

TEST(LiquidationValue, Examples) {
  EXPECT_EQ(liquidation_value(one_node(q("1/2"), q("1/2")), Rational(-2), Rational(2), NodeId{0}), q("-3/2"));
  EXPECT_EQ(liquidation_value(one_node(q("3"), q("1/2")), Rational(0), Rational(0), NodeId{0}), 0);
  EXPECT_EQ(liquidation_value(one_node(q("1"), q("1/2")), Rational(0), Rational(-1), NodeId{0}), -1);
  EXPECT_THROW(liquidation_value(one_node(q("1"), q("1/2")), Rational(0), Rational(-1), NodeId{1}),
               PreconditionError);
}

TEST(LiquidationValue, MonotoneInLambda) {
  testing::Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Rational s(testing::uniform(rng, 1, 16), 4);
    const Rational phi0(testing::uniform(rng, -8, 8), 2), phi1(testing::uniform(rng, -8, 8), 2);
    const Rational low = liquidation_value(one_node(s, q("1/8")), phi0, phi1, NodeIndex{0});
    const Rational high = liquidation_value(one_node(s, q("1/2")), phi0, phi1, NodeIndex{0});
    if (phi1 > 0) EXPECT_GT(low, high);
    if (phi1 <= 0) EXPECT_EQ(low, high);
  }
}

TEST(ShadowValue, Examples) {
  const auto det = deterministic_counterexample(q("1/2"), 4);
  const auto& tree = det.market.tree;
  const auto st = AdaptedProcess::constant(tree, q("1/2"));
  for (NodeIndex n = 0; n < tree.size(); ++n) EXPECT_EQ(shadow_value(tree, det.strategy, st, n), -1);
  EXPECT_EQ(shadow_value(tree, Strategy::zero(tree), st, 2), 0);
  EXPECT_EQ(shadow_value(tree, det.strategy, st, 0, Evaluation::PreTrade), 0);
}

TEST(ShadowValue, DominatesLiquidationValueInsideTheSpread) {
  testing::Rng rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const auto market = testing::random_market(rng, 3, 3, q("1/2"));
    const auto s = testing::random_strategy(rng, market, true);
    std::vector<Rational> st(market.tree.size());
    for (NodeIndex n = 0; n < market.tree.size(); ++n) {
      st[n] = market.price[n] * (1 - market.lambda * Rational(testing::uniform(rng, 0, 4), 4));
    }
    const AdaptedProcess shadow(market.tree, st);
    for (NodeIndex n = 0; n < market.tree.size(); ++n) {
      EXPECT_GE(shadow_value(market.tree, s, shadow, n), liquidation_value(market, s.phi0[n], s.phi1[n], n));
    }
  }
}

TEST(ShadowValue, TradeThenLiquidateNeverBeatsLiquidatingFirst) {
  testing::Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const auto market = testing::random_market(rng, 2, 3, q("1/4"));
    const auto s = testing::random_strategy(rng, market, true);
    for (NodeIndex n = 0; n < market.tree.size(); ++n) {
      const auto before = pre_trade(market.tree, s, n);
      EXPECT_LE(liquidation_value(market, s.phi0[n], s.phi1[n], n),
                liquidation_value(market, before.bond, before.stock, n));
    }
  }
}

TEST(Admissibility, ZeroStrategy) {
  testing::Rng rng(34);
  const auto market = testing::random_market(rng, 2, 2, q("1/2"));
  for (auto mode : {AdmissibilityMode::NumeraireBased, AdmissibilityMode::NumeraireFree}) {
    EXPECT_EQ(admissibility_bound(market, Strategy::zero(market.tree), mode).minimal_M, 0);
  }
}

TEST(Admissibility, DeterministicCounterexample) {
  const auto det = deterministic_counterexample(q("1/2"));
  const auto nb = admissibility_bound(det.market, det.strategy, AdmissibilityMode::NumeraireBased);
  EXPECT_EQ(nb.minimal_M, q("3/2"));
  EXPECT_EQ(nb.worst_node, det.midtime_node);
  const auto nf = admissibility_bound(det.market, det.strategy, AdmissibilityMode::NumeraireFree);
  EXPECT_EQ(nf.minimal_M, 1);
  EXPECT_EQ(nf.worst_node, det.midtime_node);
}

TEST(Admissibility, NumeraireFreeBoundIsSmaller) {
  testing::Rng rng(35);
  for (int trial = 0; trial < 40; ++trial) {
    const auto market = testing::random_market(rng, 3, 3, q("1/2"));
    const auto s = testing::random_strategy(rng, market);
    const auto nb = admissibility_bound(market, s, AdmissibilityMode::NumeraireBased);
    const auto nf = admissibility_bound(market, s, AdmissibilityMode::NumeraireFree);
    EXPECT_LE(nf.minimal_M, nb.minimal_M);
    EXPECT_GE(nb.minimal_M, 0);
    for (NodeIndex n = 0; n < market.tree.size(); ++n) {
      EXPECT_GE(nb.liquidation_pre[n], -nb.minimal_M);
      EXPECT_GE(nb.liquidation_post[n], -nb.minimal_M);
      EXPECT_GE(nf.liquidation_pre[n], -nf.minimal_M * (1 + market.price[n]));
    }
  }
}

}  // namespace
}  // namespace spreadlab
