#include <gtest/gtest.h>

#include <cmath>

#include "psmeta/meta_control.hpp"

using namespace psmeta;

TEST(WindowLength, Examples) {
  const MetaConfig cfg;
  EXPECT_EQ(eta_window_length(2, 2, cfg), 1200u);
  EXPECT_EQ(gamma_window_length(2, 2, cfg), 6000u);
  EXPECT_EQ(eta_window_length(1, 1, cfg), 300u);
  EXPECT_EQ(eta_window_length(3, 2, cfg), 1800u);
  EXPECT_EQ(eta_window_length(54, 4, cfg), 64800u);
}

TEST(WindowAccumulator, SumsAndRotates) {
  WindowAccumulator w(3);
  EXPECT_FALSE(w.accumulate(1));
  EXPECT_FALSE(w.accumulate(0));
  auto first = w.accumulate(1);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->now, 2.0);
  EXPECT_FALSE(first->previous);
  w.accumulate(1);
  w.accumulate(1);
  auto second = w.accumulate(1);
  ASSERT_TRUE(second);
  EXPECT_EQ(second->now, 3.0);
  ASSERT_TRUE(second->previous);
  EXPECT_EQ(*second->previous, 2.0);
}

TEST(WindowAccumulator, ZeroWindowsGiveZeroZero) {
  WindowAccumulator w(2);
  w.accumulate(0);
  w.accumulate(0);
  w.accumulate(0);
  auto e = w.accumulate(0);
  ASSERT_TRUE(e && e->previous);
  EXPECT_EQ(e->now, 0.0);
  EXPECT_EQ(*e->previous, 0.0);
}

TEST(WindowAccumulator, ResetDropsPartialSums) {
  WindowAccumulator w(2);
  w.accumulate(1);
  w.accumulate(1);
  w.accumulate(1);
  w.reset(3);
  EXPECT_EQ(w.tau(), 3u);
  EXPECT_EQ(w.ticks(), 0u);
  EXPECT_EQ(w.current_sum(), 0.0);
  EXPECT_FALSE(w.previous_sum());
  EXPECT_THROW(w.reset(0), ConfigError);
}

TEST(WindowAccumulator, ResizeRescalesPrevious) {
  WindowAccumulator w(2);
  w.accumulate(1);
  w.accumulate(1);
  w.accumulate(1);
  w.resize(4);
  EXPECT_EQ(w.tau(), 4u);
  EXPECT_EQ(w.ticks(), 0u);
  EXPECT_EQ(w.current_sum(), 0.0);
  EXPECT_EQ(w.previous_sum(), 4.0);
  for (int i = 0; i < 3; ++i) EXPECT_FALSE(w.accumulate(0.5));
  auto e = w.accumulate(0.5);
  ASSERT_TRUE(e && e->previous);
  EXPECT_EQ(window_delta(e->now, *e->previous), -0.5);
  WindowAccumulator fresh(3);
  fresh.resize(6);
  EXPECT_FALSE(fresh.previous_sum());
  EXPECT_THROW(fresh.resize(0), ConfigError);
}

TEST(WindowDelta, Examples) {
  EXPECT_DOUBLE_EQ(window_delta(10, 5), 0.5);
  EXPECT_DOUBLE_EQ(window_delta(5, 10), -0.5);
  EXPECT_EQ(window_delta(0, 0), 0.0);
}

TEST(InternalReward, Examples) {
  EXPECT_EQ(internal_reward(0.3), 1);
  EXPECT_EQ(internal_reward(-0.0001), -1);
  EXPECT_EQ(internal_reward(0.0), 0);
}

TEST(InternalReward, ZeroDeltaLeavesMetaNetworkUnchanged) {
  MetaNetwork net({"x", "y"}, 0.0);
  Rng rng = make_rng(1);
  net.select(rng);
  net.update(internal_reward(window_delta(0, 0)));
  EXPECT_EQ(net.action_h(0), 1.0);
  EXPECT_EQ(net.action_h(1), 1.0);
}

TEST(MetaUpdate, Examples) {
  MetaNetwork net({"only"}, 0.0);
  Rng rng = make_rng(1);
  net.update(1);  // no trace yet: ignored
  EXPECT_EQ(net.action_h(0), 1.0);
  net.select(rng);
  net.set_action_h(0, 3.0);
  net.update(-1);
  EXPECT_EQ(net.action_h(0), 2.0);
  net.set_action_h(0, 1.0);
  net.update(-1);
  EXPECT_EQ(net.action_h(0), 1.0);
  net.update(1);
  EXPECT_EQ(net.action_h(0), 2.0);
}

TEST(MetaUpdate, OnlyTracedEdgeIsRewarded) {
  MetaNetwork net({"x", "y", "z"}, 0.0);
  Rng rng = make_rng(5);
  const auto a = net.select(rng);
  net.update(1);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(net.action_h(i), i == a ? 2.0 : 1.0);
}

TEST(MetaUpdate, DampingPullsTowardOne) {
  MetaNetwork net({"x", "y"}, 0.5);
  Rng rng = make_rng(5);
  const auto a = net.select(rng);
  net.set_action_h(1 - a, 5.0);
  net.update(0);
  EXPECT_EQ(net.action_h(1 - a), 3.0);
}

TEST(SelectEta, FreshNetworkIsUniform) {
  EtaController ctl(100, MetaConfig{});
  Rng rng = make_rng(12);
  std::array<int, kEtaActionCount> counts{};
  for (int i = 0; i < 10000; ++i) {
    ctl.select(rng);
    ++counts[ctl.action()];
    EXPECT_EQ(ctl.eta(), kEtaValues[ctl.action()]);
  }
  for (int c : counts) EXPECT_NEAR(c / 10000.0, 0.1, 0.01);
}

TEST(SelectEta, BiasedNetwork) {
  EtaController ctl(100, MetaConfig{});
  ctl.network().set_action_h(9, 91.0);
  EXPECT_DOUBLE_EQ(ctl.network().probability(9), 0.91);
}

TEST(SelectEta, RewardsRaiseSelectionFrequency) {
  EtaController ctl(100, MetaConfig{});
  Rng rng = make_rng(3);
  double last = ctl.network().probability(0);
  int rewarded = 0;
  for (int i = 0; i < 5000 && rewarded < 20; ++i) {
    ctl.select(rng);
    if (ctl.action() != 0) continue;
    ctl.network().update(1);
    ++rewarded;
    const double now = ctl.network().probability(0);
    EXPECT_GT(now, last);
    last = now;
  }
  EXPECT_EQ(rewarded, 20);
}

TEST(SelectEta, ForceOffGrid) {
  EtaController ctl(100, MetaConfig{});
  ctl.force(0.3);
  EXPECT_EQ(ctl.action(), 2u);
  ctl.force(0.25);
  EXPECT_EQ(ctl.eta(), 0.25);
  EXPECT_EQ(ctl.action(), kEtaActionCount);
}

TEST(TildeDelta, Examples) {
  EXPECT_NEAR(tilde_delta(-1, 0.2), -2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(tilde_delta(1, 0.2), 1.0);
  EXPECT_NEAR(tilde_delta(0, 0.2), 1.0 / 6.0, 1e-15);
}

TEST(Rules, Examples) {
  EXPECT_NEAR(rule_one(0.0, -2.0 / 3.0), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(rule_one(0.5, 1.0), 0.0);
  EXPECT_EQ(rule_one(0.4, 0.0), 0.4);
  EXPECT_EQ(rule_two(0.0, 1.0), 1.0);
  EXPECT_EQ(rule_two(0.5, -1.0), 0.0);
  for (double g : {0.0, 0.3, 1.0}) EXPECT_EQ(rule_two(g, 0.0), g);
}

TEST(Rules, RangePreservedUnderRandomSequences) {
  Rng rng = make_rng(17);
  for (int run = 0; run < 200; ++run) {
    double g = uniform01(rng);
    for (int step = 0; step < 500; ++step) {
      const double t = tilde_delta(2.0 * uniform01(rng) - 1.0, 0.2);
      g = uniform01(rng) < 0.5 ? rule_one(g, t) : rule_two(g, t);
      ASSERT_GE(g, 0.0);
      ASSERT_LE(g, 1.0);
    }
  }
}

TEST(Rules, ConstantSmallImprovementDrift) {
  // At tilde delta = 1/6 rule I decays gamma geometrically toward 0 and
  // rule II pulls it toward 1/5: g <- (5/6) g + 1/6 * {0, 1}.
  const double t = tilde_delta(0.0, 0.2);
  double one = 0.5, two = 0.0;
  for (int i = 0; i < 200; ++i) {
    one = rule_one(one, t);
    two = rule_two(two, t);
  }
  EXPECT_NEAR(one, 0.5 * std::pow(5.0 / 6.0, 200), 1e-15);
  EXPECT_NEAR(two, 1.0, 1e-12);
  double two_small = 0.0;
  two_small = rule_two(two_small, t);
  EXPECT_NEAR(two_small, 1.0 / 6.0, 1e-15);
}

TEST(DeltaScale, InvariantUnderPositiveRescaling) {
  Rng rng = make_rng(23);
  for (int i = 0; i < 10000; ++i) {
    const double a = 50.0 * uniform01(rng), b = 50.0 * uniform01(rng);
    const double k = std::ldexp(1.0, static_cast<int>(uniform_index(rng, 30)) - 15);
    ASSERT_EQ(window_delta(k * a, k * b), window_delta(a, b));
    const double any = 0.001 + 1000.0 * uniform01(rng);
    ASSERT_EQ(internal_reward(window_delta(any * a, any * b)), internal_reward(window_delta(a, b)));
  }
}

TEST(GammaStep, BiasedNetworkPicksRuleOneAfterCollapse) {
  MetaConfig cfg;
  cfg.rule_bias = std::array<double, 2>{1e5, 1.0};
  GammaController ctl(10, cfg);
  EXPECT_NEAR(ctl.rule_one_probability(), 1.0 - 1.0 / 100001.0, 1e-15);
  ctl.set_gamma(0.0);
  Rng rng = make_rng(9);
  const auto r = ctl.step(0.0, 10.0, rng);  // delta = -1
  EXPECT_EQ(r.internal_reward, -1);
  EXPECT_EQ(r.rule, GammaRule::I);
  EXPECT_NEAR(r.gamma, 2.0 / 3.0, 1e-15);
}

TEST(GammaStep, RewardGoesToPreviousRule) {
  GammaController ctl(10, MetaConfig{});
  Rng rng = make_rng(4);
  const auto first = ctl.step(5.0, 5.0, rng);  // nothing to reward yet, delta 0
  EXPECT_EQ(first.internal_reward, 0);
  EXPECT_EQ(ctl.network().action_h(0), 1.0);
  EXPECT_EQ(ctl.network().action_h(1), 1.0);
  const auto chosen = static_cast<std::size_t>(first.rule);
  ctl.step(10.0, 5.0, rng);  // improvement rewards the rule chosen above
  EXPECT_EQ(ctl.network().action_h(chosen), 2.0);
  EXPECT_EQ(ctl.network().action_h(1 - chosen), 1.0);
}

TEST(GammaStep, StaysInRange) {
  GammaController ctl(10, MetaConfig{});
  Rng rng = make_rng(8);
  ctl.set_gamma(uniform01(rng));
  for (int i = 0; i < 5000; ++i) {
    const auto r = ctl.step(10.0 * uniform01(rng), 10.0 * uniform01(rng), rng);
    ASSERT_GE(r.gamma, 0.0);
    ASSERT_LE(r.gamma, 1.0);
  }
  for (std::size_t a = 0; a < 2; ++a) EXPECT_GE(ctl.network().action_h(a), 1.0);
}

TEST(MetaNetwork, HValuesNeverBelowOne) {
  MetaNetwork net({"a", "b", "c"}, 0.1);
  Rng rng = make_rng(6);
  for (int i = 0; i < 10000; ++i) {
    net.select(rng);
    net.update(uniform01(rng) < 0.5 ? -1 : 1);
    for (std::size_t a = 0; a < 3; ++a) ASSERT_GE(net.action_h(a), 1.0);
  }
}

TEST(MetaNetwork, PositiveRewardsStrictlyRaiseProbability) {
  MetaNetwork net({"a", "b"}, 0.0);
  Rng rng = make_rng(2);
  double last = net.probability(0);
  for (int i = 0; i < 200; ++i) {
    if (net.select(rng) != 0) continue;
    net.update(1);
    EXPECT_GT(net.probability(0), last);
    last = net.probability(0);
  }
}
