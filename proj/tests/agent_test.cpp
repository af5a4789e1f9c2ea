#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ltlmarl/agent/agent.hpp"

using namespace ltlmarl::agent;
namespace nn = ltlmarl::nn;
namespace ltl = ltlmarl::ltl;

TEST(Replay, RingKeepsTheNewestItems) {
  ReplayBuffer<int> b(3);
  for (int i = 0; i < 5; ++i) b.push(i);
  EXPECT_EQ(b.size(), 3u);
  EXPECT_EQ(b.total_pushed(), 5u);
  std::multiset<int> held{b[0], b[1], b[2]};
  EXPECT_EQ(held, (std::multiset<int>{2, 3, 4}));
  EXPECT_THROW(ReplayBuffer<int>(0), std::invalid_argument);
}

TEST(Replay, SampleNeedsAFullBatch) {
  ReplayBuffer<int> b(10);
  std::mt19937_64 rng(1);
  b.push(7);
  EXPECT_TRUE(b.sample(2, rng).empty());
  b.push(8);
  auto s = b.sample(2, rng);
  ASSERT_EQ(s.size(), 2u);
  for (auto* p : s) EXPECT_TRUE(*p == 7 || *p == 8);
}

TEST(Epsilon, GeometricDecayToFloor) {
  EpsilonSchedule e({1.0, 0.1, 0.5});
  const double expected[] = {1.0, 0.5, 0.25, 0.125, 0.1, 0.1};
  for (double x : expected) {
    EXPECT_DOUBLE_EQ(e.value(), x);
    e.anneal();
  }
  e.restore(3.0);
  EXPECT_EQ(e.value(), 1.0);
  EXPECT_THROW(EpsilonSchedule({0.5, 0.6, 0.9}), std::invalid_argument);
}

TEST(SelectGoal, UniformOverAllowedGoalsWhenExploring) {
  std::mt19937_64 rng(3);
  nn::QPair meta(nn::DenseNetwork::random({4, 8, 7}, rng));
  GoalMask mask{0, 1, 0, 1, 1, 0, 0};
  std::vector<double> obs{0.1, 0.2, 0.3, 0.4};
  std::array<int, 7> counts{};
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(select_goal(meta, obs, mask, 1.0, rng))];
  double chi2 = 0;
  for (std::size_t g = 0; g < 7; ++g) {
    if (!mask[g]) {
      EXPECT_EQ(counts[g], 0);
      continue;
    }
    double expect = draws / 3.0;
    chi2 += (counts[g] - expect) * (counts[g] - expect) / expect;
  }
  EXPECT_LT(chi2, 13.82);  // 2 degrees of freedom, p = 0.001
}

TEST(SelectGoal, GreedyIsMaskedArgmax) {
  nn::DenseNetwork net({1, 3});
  net.layers()[0].bias << 5.0, 2.0, 2.0;
  nn::QPair meta(net);
  std::mt19937_64 rng(0);
  auto before = rng;
  EXPECT_EQ(select_goal(meta, {0.0}, {1, 1, 1}, 0.0, rng), 0);
  EXPECT_EQ(select_goal(meta, {0.0}, {0, 1, 1}, 0.0, rng), 1);  // tie -> lower index
  EXPECT_EQ(select_goal(meta, {0.0}, {0, 0, 1}, 0.0, rng), 2);
  EXPECT_EQ(rng, before);  // greedy selection consumes no randomness
  EXPECT_THROW(select_goal(meta, {0.0}, {0, 0, 0}, 0.0, rng), std::invalid_argument);
}

TEST(Intrinsic, OneExactlyWhenTheGoalFires) {
  auto wood = ltl::Proposition::intern("got_wood");
  auto iron = ltl::Proposition::intern("got_iron");
  EXPECT_EQ(intrinsic_reward(wood, {wood, iron}), 1.0);
  EXPECT_EQ(intrinsic_reward(wood, {iron}), 0.0);
  EXPECT_EQ(intrinsic_reward(wood, {}), 0.0);
}

TEST(ControllerInput, ObservationThenOneHotGoal) {
  auto x = controller_input({0.5, -1.0}, 2, 3);
  ASSERT_EQ(x.size(), 5);
  EXPECT_EQ(x(0), 0.5);
  EXPECT_EQ(x(1), -1.0);
  EXPECT_EQ(x(2), 0.0);
  EXPECT_EQ(x(3), 0.0);
  EXPECT_EQ(x(4), 1.0);
}

namespace {
AgentConfig small_config() {
  AgentConfig c;
  c.observation_size = 2;
  c.num_goals = 2;
  c.num_actions = 2;
  c.hidden = {8};
  c.batch_size = 4;
  c.buffer_capacity = 50;
  c.sync_period = 10;
  c.adam.learning_rate = 1e-2;
  return c;
}
}  // namespace

TEST(Learn, NoOpBelowOneBatch) {
  HierarchicalAgent a(small_config(), 5);
  auto before = a.controller().online;
  for (int i = 0; i < 3; ++i) a.remember(ControllerTransition{{0, 0}, 0, 0, 0, {0, 0}, false});
  EXPECT_FALSE(a.learn_controller());
  EXPECT_FALSE(a.learn_meta());
  EXPECT_EQ(a.controller().online, before);
}

TEST(Learn, TerminalRewardIsFittedExactly) {
  // One terminal transition paying 1: its Q-value must converge to 1.
  HierarchicalAgent a(small_config(), 6);
  for (int i = 0; i < 8; ++i) a.remember(ControllerTransition{{1, 0}, 1, 0, 1.0, {0, 1}, true});
  for (int i = 0; i < 600; ++i) ASSERT_TRUE(a.learn_controller());
  auto q = a.controller().online.forward(controller_input({1, 0}, 0, 2));
  EXPECT_NEAR(q(1), 1.0, 1e-3);
}

TEST(Learn, BootstrapsThroughTheTargetNetwork) {
  // s0 -> s1 with reward 0, s1 terminal with reward 1 under one action:
  // the fixed point is Q(s0) = gamma.
  auto cfg = small_config();
  cfg.num_actions = 1;
  HierarchicalAgent a(cfg, 7);
  for (int i = 0; i < 4; ++i) {
    a.remember(ControllerTransition{{1, 0}, 0, 0, 0.0, {0, 1}, false});
    a.remember(ControllerTransition{{0, 1}, 0, 0, 1.0, {0, 0}, true});
  }
  for (int i = 0; i < 3000; ++i) a.learn_controller();
  auto q0 = a.controller().online.forward(controller_input({1, 0}, 0, 2));
  EXPECT_NEAR(q0(0), cfg.gamma, 0.02);
}

TEST(Learn, MetaTargetRespectsTheNextGoalMask) {
  // Goal 1 looks better at the end state but is unavailable there, so the
  // bootstrap must use goal 0's value.
  auto cfg = small_config();
  HierarchicalAgent a(cfg, 8);
  auto& net = a.meta().online;
  for (auto& l : net.layers()) {
    l.weight.setZero();
    l.bias.setZero();
  }
  net.layers().back().bias << 1.0, 10.0;
  a.meta().sync();
  double masked = nn::ddqn_target(a.meta(), 0.0, nn::Vector::Zero(2), 0.9, false, {1, 0});
  double open = nn::ddqn_target(a.meta(), 0.0, nn::Vector::Zero(2), 0.9, false, {1, 1});
  EXPECT_DOUBLE_EQ(masked, 0.9);
  EXPECT_DOUBLE_EQ(open, 9.0);
}

TEST(Learn, SameSeedSameUpdates) {
  HierarchicalAgent a(small_config(), 11), b(small_config(), 11);
  for (auto* x : {&a, &b}) {
    for (int i = 0; i < 10; ++i) {
      x->remember(ControllerTransition{{0.1 * i, 1}, i % 2, i % 2, i % 3 == 0 ? 1.0 : 0.0, {1, 0}, false});
      x->remember(MetaTransition{{0.1 * i, 1}, i % 2, -1.0 * i, {1, 0}, i == 9, {1, 1}});
    }
    for (int i = 0; i < 20; ++i) {
      x->learn_controller();
      x->learn_meta();
    }
  }
  EXPECT_EQ(a.controller().online, b.controller().online);
  EXPECT_EQ(a.meta().target, b.meta().target);
}

TEST(Checkpoint, RoundTripRestoresNetworksAndExploration) {
  HierarchicalAgent a(small_config(), 21);
  a.end_episode({1, 0});
  a.end_episode({1, 0});
  std::stringstream s;
  a.save(s);
  HierarchicalAgent b(small_config(), 99);
  b.load(s);
  EXPECT_EQ(a.controller().online, b.controller().online);
  EXPECT_EQ(a.meta().target, b.meta().target);
  EXPECT_EQ(a.meta_epsilon().value(), b.meta_epsilon().value());
  EXPECT_EQ(a.goal_epsilon(0).value(), b.goal_epsilon(0).value());
  EXPECT_EQ(b.goal_epsilon(1).value(), 1.0);

  auto other = small_config();
  other.hidden = {4};
  HierarchicalAgent c(other, 1);
  std::stringstream s2;
  a.save(s2);
  EXPECT_THROW(c.load(s2), ltlmarl::DataError);
  std::stringstream junk("not a checkpoint");
  EXPECT_THROW(c.load(junk), ltlmarl::DataError);
}

TEST(EndEpisode, AnnealsOnlyPursuedGoals) {
  auto cfg = small_config();
  cfg.meta_epsilon = {1.0, 0.0, 0.5};
  cfg.controller_epsilon = {1.0, 0.0, 0.5};
  HierarchicalAgent a(cfg, 1);
  a.end_episode({0, 1});
  EXPECT_EQ(a.meta_epsilon().value(), 0.5);
  EXPECT_EQ(a.goal_epsilon(0).value(), 1.0);
  EXPECT_EQ(a.goal_epsilon(1).value(), 0.5);
}
