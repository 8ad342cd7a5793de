#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "psmeta/env/invasion.hpp"
#include "psmeta/env/maps.hpp"
#include "psmeta/env/nship.hpp"

using namespace psmeta;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Invasion, RewardFollowsSymbol) {
  Rng rng = make_rng(1);
  InvasionGame game;
  std::size_t s = game.reset(rng);
  for (int i = 0; i < 1000; ++i) {
    const auto other = game.step(1 - s, rng);
    EXPECT_EQ(other.reward, 0.0);
    EXPECT_TRUE(other.trial_ended);
    s = other.next_percept;
    const auto right = game.step(s, rng);
    EXPECT_EQ(right.reward, 1.0);
    s = right.next_percept;
  }
}

TEST(Invasion, SymbolsAreBalanced) {
  Rng rng = make_rng(2);
  InvasionGame game;
  std::size_t left = game.reset(rng) == 0;
  for (int i = 0; i < 20000; ++i) left += game.step(0, rng).next_percept == 0;
  EXPECT_NEAR(left / 20001.0, 0.5, 0.015);
}

TEST(Invasion, FixedPeriodInvertsAtBoundaries) {
  Rng rng = make_rng(3);
  InvasionGame game(InvasionSchedule::fixed({5}));
  game.reset(rng);
  std::vector<int> changes;
  for (int t = 1; t <= 20; ++t) {
    game.step(0, rng);
    if (game.advance_schedule(0.0)) changes.push_back(t);
  }
  EXPECT_EQ(changes, (std::vector<int>{5, 10, 15, 20}));
  EXPECT_FALSE(game.inverted());
  EXPECT_EQ(game.correct_action(InvasionGame::kLeftSymbol), InvasionGame::kLeft);
}

TEST(Invasion, InvertedRewardsOppositeAction) {
  Rng rng = make_rng(4);
  InvasionGame game(InvasionSchedule::fixed({1, 1}));
  std::size_t s = game.reset(rng);
  s = game.step(s, rng).next_percept;
  ASSERT_TRUE(game.advance_schedule(0.0));
  EXPECT_TRUE(game.inverted());
  EXPECT_EQ(game.step(s, rng).reward, 0.0);
}

TEST(Invasion, ThresholdSchedule) {
  Rng rng = make_rng(5);
  InvasionGame game(InvasionSchedule::success_threshold(0.8, 2));
  game.reset(rng);
  EXPECT_FALSE(game.advance_schedule(0.79));
  EXPECT_TRUE(game.advance_schedule(0.8));
  EXPECT_EQ(game.phase(), 1u);
  EXPECT_FALSE(game.finished());
  EXPECT_TRUE(game.advance_schedule(0.95));
  EXPECT_TRUE(game.finished());
}

TEST(Invasion, SinglePhaseNeverChanges) {
  Rng rng = make_rng(6);
  InvasionGame game;
  game.reset(rng);
  for (int i = 0; i < 100; ++i) EXPECT_FALSE(game.advance_schedule(1.0));
  EXPECT_FALSE(game.finished());
}

TEST(Invasion, BadActionThrows) {
  Rng rng = make_rng(7);
  InvasionGame game;
  game.reset(rng);
  EXPECT_THROW(game.step(2, rng), InvalidActionError);
}

TEST(NShip, SequencesFromExamples) {
  Rng rng = make_rng(8);
  NShipGame game(3);
  game.reset(rng);
  // pass, pass, block: the big reward
  std::vector<double> r;
  r.push_back(game.step(NShipGame::kPass, rng).reward);
  r.push_back(game.step(NShipGame::kPass, rng).reward);
  const auto last = game.step(NShipGame::kBlock, rng);
  r.push_back(last.reward);
  EXPECT_EQ(r, (std::vector<double>{0, 0, 10}));
  EXPECT_TRUE(last.trial_ended);
  EXPECT_EQ(last.next_percept, 0u);
  // block, pass, pass
  r.clear();
  r.push_back(game.step(NShipGame::kBlock, rng).reward);
  r.push_back(game.step(NShipGame::kPass, rng).reward);
  r.push_back(game.step(NShipGame::kPass, rng).reward);
  EXPECT_EQ(r, (std::vector<double>{1, 0, 0}));
}

TEST(NShip, EarlyBlockForfeitsBigReward) {
  Rng rng = make_rng(9);
  NShipGame game(2);
  game.reset(rng);
  EXPECT_EQ(game.step(NShipGame::kBlock, rng).reward, 1.0);
  EXPECT_EQ(game.step(NShipGame::kBlock, rng).reward, 0.0);
}

TEST(NShip, SingleShipPaysOneForBlock) {
  Rng rng = make_rng(9);
  NShipGame game(1);
  game.reset(rng);
  const auto s = game.step(NShipGame::kBlock, rng);
  EXPECT_EQ(s.reward, 1.0);
  EXPECT_TRUE(s.trial_ended);
  EXPECT_EQ(game.step(NShipGame::kPass, rng).reward, 0.0);
}

TEST(NShip, ExpectedRewardMatchesEnumeration) {
  Rng rng = make_rng(10);
  for (std::size_t n = 1; n <= 5; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> p(n);
      for (auto& x : p) x = uniform01(rng);
      double brute = 0.0;
      for (std::size_t mask = 0; mask < (1u << n); ++mask) {
        NShipGame game(n);
        game.reset(rng);
        double prob = 1.0, reward = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const bool block = (mask >> i) & 1u;
          prob *= block ? p[i] : 1.0 - p[i];
          reward += game.step(block ? NShipGame::kBlock : NShipGame::kPass, rng).reward;
        }
        brute += prob * reward;
      }
      EXPECT_NEAR(nship_expected_reward(p), brute, 1e-12) << "n=" << n;
    }
  }
}

TEST(NShip, ExpectedRewardExamples) {
  EXPECT_DOUBLE_EQ(nship_expected_reward(std::vector<double>{0, 0, 0, 1}), 15.0);
  EXPECT_DOUBLE_EQ(nship_expected_reward(std::vector<double>{1, 1, 1, 1}), 3.0);
  EXPECT_DOUBLE_EQ(nship_expected_reward(std::vector<double>{0.5, 0.5}), 1.75);
  EXPECT_DOUBLE_EQ(nship_random_reward(2), 1.75);
  EXPECT_EQ(nship_optimal_reward(1), 1.0);
  EXPECT_EQ(nship_optimal_reward(4), 15.0);
}

TEST(NShip, ScheduleGrowsNBetweenGames) {
  Rng rng = make_rng(11);
  NShipGame game(NShipSchedule{1, 3, {2, 2, 2}, PhaseUnit::Trials});
  game.reset(rng);
  std::vector<std::size_t> ns;
  int changes = 0;
  for (int i = 0; i < 40 && !game.finished(); ++i) {
    const auto s = game.step(NShipGame::kPass, rng);
    if (game.advance_schedule(0.0)) {
      ++changes;
      EXPECT_TRUE(s.trial_ended);
      EXPECT_EQ(game.ship(), 0u);
    }
    ns.push_back(game.n());
  }
  EXPECT_EQ(changes, 2);
  // 2 games of 1 ship, 2 of 2, 2 of 3
  EXPECT_EQ(ns.size(), 2u + 4u + 6u);
  EXPECT_TRUE(game.finished());
}

TEST(NShip, BadConfigThrows) {
  EXPECT_THROW(NShipGame(NShipSchedule{0, 1, {}, PhaseUnit::Trials}), ConfigError);
  EXPECT_THROW(NShipGame(NShipSchedule{3, 2, {}, PhaseUnit::Trials}), ConfigError);
  EXPECT_THROW(NShipGame(NShipSchedule{1, 3, {5}, PhaseUnit::Trials}), ConfigError);
}

TEST(GridMap, ShippedDistances) {
  for (char id : {'a', 'b', 'c'}) {
    const GridMap m = shipped_map(id);
    EXPECT_EQ(m.width, 9u);
    EXPECT_EQ(m.height, 6u);
    EXPECT_EQ(m.goal_distance, 14u) << id;
  }
  EXPECT_FALSE(shipped_map('a').distractor);
  EXPECT_EQ(shipped_map('c').distractor_distance, 12u);
  EXPECT_THROW(shipped_map('d'), LookupError);
}

TEST(GridMap, DataFilesMatchBuiltIns) {
  const std::string dir = PSMETA_DATA_DIR;
  EXPECT_EQ(read_file(dir + "/maps/a.txt"), std::string(kMapA));
  EXPECT_EQ(read_file(dir + "/maps/b.txt"), std::string(kMapB));
  EXPECT_EQ(read_file(dir + "/maps/c.txt"), std::string(kMapC));
}

TEST(GridMap, AdjacentGoal) {
  const GridMap m = load_map("SG\n");
  EXPECT_EQ(m.goal_distance, 1u);
  Rng rng = make_rng(1);
  GridWorld world(m);
  world.reset(rng);
  const auto s = world.step(static_cast<std::size_t>(Move::Right), rng);
  EXPECT_EQ(s.reward, kGoalReward);
  EXPECT_TRUE(s.trial_ended);
  EXPECT_EQ(s.next_percept, 0u);
}

TEST(GridMap, MapErrors) {
  EXPECT_THROW(load_map(""), MapError);
  EXPECT_THROW(load_map("S.G\n.."), MapError);
  EXPECT_THROW(load_map("S.x\n"), MapError);
  EXPECT_THROW(load_map("..G\n"), MapError);
  EXPECT_THROW(load_map("S.G\nS..\n"), MapError);
  EXPECT_THROW(load_map("S..\n...\n"), MapError);
  EXPECT_THROW(load_map("S#G\n"), MapError);
  EXPECT_THROW(load_map("SgG\ng..\n"), MapError);
  EXPECT_THROW(load_map("S.G\n###\n..g\n"), MapError);
  EXPECT_NO_THROW(load_map("S.G\r\n...\r\n"));
}

TEST(GridWorld, WallsAndBordersBlock) {
  Rng rng = make_rng(2);
  GridWorld world(shipped_map('a'));
  world.reset(rng);
  const Position start = world.position();
  EXPECT_EQ(start, (Position{2, 0}));
  auto s = world.step(static_cast<std::size_t>(Move::Left), rng);
  EXPECT_EQ(world.position(), start);
  EXPECT_EQ(s.reward, 0.0);
  world.step(static_cast<std::size_t>(Move::Right), rng);
  world.step(static_cast<std::size_t>(Move::Right), rng);  // (2,2) is a wall
  EXPECT_EQ(world.position(), (Position{2, 1}));
  EXPECT_THROW(world.step(4, rng), InvalidActionError);
}

TEST(GridWorld, DistractorEndsTrialWithSmallReward) {
  Rng rng = make_rng(3);
  GridWorld world(shipped_map('c'));
  world.reset(rng);
  // down to the bottom row, then right along it, then up into g at (4,8)
  std::vector<Move> path{Move::Down, Move::Down, Move::Down};
  for (int i = 0; i < 8; ++i) path.push_back(Move::Right);
  path.push_back(Move::Up);
  EnvStep last;
  for (auto m : path) last = world.step(static_cast<std::size_t>(m), rng);
  EXPECT_EQ(last.reward, kDistractorReward);
  EXPECT_TRUE(last.trial_ended);
  EXPECT_EQ(world.position(), world.map().start);
}

TEST(GridWorld, RandomWalkStepsAtLeastShortestPath) {
  Rng rng = make_rng(4);
  GridWorld world(shipped_map('c'));
  world.reset(rng);
  std::size_t steps = 0;
  int trials = 0;
  while (trials < 300) {
    const auto s = world.step(uniform_index(rng, 4), rng);
    ++steps;
    if (!s.trial_ended) continue;
    ++trials;
    EXPECT_GE(steps, s.reward == kGoalReward ? 14u : 12u);
    steps = 0;
  }
}

TEST(GridWorld, PhasesSwitchMapsAfterTrials) {
  Rng rng = make_rng(5);
  GridWorld world({load_map("SG\n"), load_map("GS\n")}, {2, 3});
  world.reset(rng);
  const auto right = static_cast<std::size_t>(Move::Right);
  const auto left = static_cast<std::size_t>(Move::Left);
  std::vector<int> changes;
  for (int t = 1; t <= 2; ++t) {
    ASSERT_EQ(world.step(right, rng).reward, 1.0);
    if (world.advance_schedule(0)) changes.push_back(t);
  }
  EXPECT_EQ(changes, std::vector<int>{2});
  EXPECT_EQ(world.position(), (Position{0, 1}));
  for (int t = 0; t < 3; ++t) {
    ASSERT_EQ(world.step(left, rng).reward, 1.0);
    world.advance_schedule(0);
  }
  EXPECT_TRUE(world.finished());
  EXPECT_EQ(world.percept_count(), 2u);
}

TEST(GridWorld, MismatchedMapsRejected) {
  EXPECT_THROW(GridWorld({load_map("SG\n"), load_map("S.G\n")}, {1, 1}), ConfigError);
  EXPECT_THROW(GridWorld({load_map("SG\n")}, {1, 1}), ConfigError);
}

TEST(PhaseClock, BoundariesAtMultiples) {
  PhaseClock clock({3, 2});
  std::vector<int> at;
  for (int t = 1; t <= 5; ++t)
    if (clock.tick()) at.push_back(t);
  EXPECT_EQ(at, (std::vector<int>{3, 5}));
  EXPECT_TRUE(clock.finished());
}
