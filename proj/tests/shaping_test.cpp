#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "ltlmarl/ltl/parser.hpp"
#include "ltlmarl/shaping/reward.hpp"
#include "ltlmarl/shaping/transformation.hpp"
#include "support/games.hpp"
#include "support/ltl_corpus.hpp"

namespace ltl = ltlmarl::ltl;
using namespace ltlmarl::shaping;

namespace {
ltl::LabelSet L(std::initializer_list<const char*> names) {
  ltl::LabelSet s;
  for (auto n : names) s.insert(ltl::Proposition::intern(n));
  return s;
}
}  // namespace

TEST(BaseReward, CompletingEventPaysPlusOne) {
  auto p = TaskProgress::start(ltl::parse("F got_wood"));
  auto r = base_reward(p, L({"got_wood"}));
  EXPECT_EQ(r.reward, 1.0);
  EXPECT_EQ(r.next.status, Status::kSatisfied);
  EXPECT_TRUE(r.next.current.is_true());
}

TEST(BaseReward, NothingHappensPaysMinusOne) {
  auto p = TaskProgress::start(ltl::parse("F got_wood"));
  auto r = base_reward(p, L({}));
  EXPECT_EQ(r.reward, -1.0);
  EXPECT_EQ(r.next.status, Status::kOpen);
}

TEST(BaseReward, NightOutsideFalsifies) {
  auto f = ltl::parse("!is_night U at_shelter");
  auto r = base_reward(TaskProgress::start(f), L({"is_night"}));
  EXPECT_EQ(r.reward, -1.0);
  EXPECT_EQ(r.next.status, Status::kFalsified);
  // the trace semantics agree: no extension of <{is_night}> satisfies f
  for (const auto& tail : corpus::all_traces(3, {ltl::Proposition::intern("is_night"),
                                                 ltl::Proposition::intern("at_shelter")})) {
    ltl::Trace t{L({"is_night"})};
    t.insert(t.end(), tail.begin(), tail.end());
    EXPECT_FALSE(ltl::evaluate(t, 0, f));
  }
  EXPECT_THROW(base_reward(r.next, L({})), std::logic_error);
}

TEST(BaseReward, FirstPlusOneMatchesShortestSatisfyingPrefix) {
  auto ps = corpus::props(2);
  auto traces = corpus::all_traces(4, ps);
  for (const auto& f : corpus::enumerate(3, ps, corpus::Grammar::kCoSafe)) {
    for (const auto& t : traces) {
      auto prog = TaskProgress::start(f);
      long first = -1;
      for (std::size_t i = 0; i < t.size() && !prog.resolved(); ++i) {
        auto r = base_reward(prog, t[i]);
        prog = r.next;
        if (r.reward > 0) first = static_cast<long>(i);
      }
      long by_semantics = -1;
      for (std::size_t k = 1; k <= t.size(); ++k) {
        if (ltl::evaluate(ltl::Trace(t.begin(), t.begin() + static_cast<long>(k)), 0, f)) {
          by_semantics = static_cast<long>(k) - 1;
          break;
        }
      }
      ASSERT_EQ(first, by_semantics) << f.to_string();
    }
  }
}

TEST(UpdateValue, Arithmetic) {
  EvaluationState ev{{0.0, 0.5}, 1.0, 0.9};
  EXPECT_DOUBLE_EQ(update_value(ev, 0, -1).values[0], -1.0);
  EXPECT_DOUBLE_EQ(update_value(ev, 0, -1).values[1], 0.5);
  ev.values[0] = 0.01;
  EXPECT_DOUBLE_EQ(update_value(ev, 0, 1).values[0], 1.009);
  ev.xi = 0;
  EXPECT_EQ(update_value(ev, 0, 7).values[0], 0.0);
  EXPECT_THROW(update_value(ev, 2, 0), std::out_of_range);
}

TEST(ShapedReward, Arithmetic) {
  EXPECT_DOUBLE_EQ(shaped_reward(-1, {{0, 0}, 1, 0.9}), -1);
  EXPECT_DOUBLE_EQ(shaped_reward(1, {{0.5, 1.0}, 1, 0.9}), 0.6);
  EXPECT_DOUBLE_EQ(shaped_reward(1, {{0.5, 1.0}, 1, 0.9}, false), 1.0);
  // min V = gamma * max V
  EXPECT_DOUBLE_EQ(shaped_reward(0.25, {{0.9, 1.0}, 1, 0.9}), 0.25);
}

TEST(ShapedReward, NeutralWhenMinEqualsGammaMax) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 1000; ++i) {
    double gamma = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
    double vmax = std::abs(u(rng));
    EvaluationState ev{{gamma * vmax, vmax, (gamma * vmax + vmax) / 2}, 1, gamma};
    double base = u(rng);
    EXPECT_NEAR(shaped_reward(base, ev), base, 1e-12);
  }
}

TEST(ShapedReward, StrictlyIncreasingInBase) {
  EvaluationState ev{{-0.3, 0.7}, 1, 0.9};
  EXPECT_LT(shaped_reward(-1, ev), shaped_reward(-0.5, ev));
  EXPECT_LT(shaped_reward(-0.5, ev), shaped_reward(1, ev));
}

TEST(Transformation, OneStateAlwaysTriggeredIsGeometricSum) {
  auto g = parse_game(
      "states 1\nagents 1\nactions 1\nprops p\nlabel 0 p\nformula F p\nhorizon 5\n"
      "gamma 0.9\ninitial 0\n");
  auto r = verify_transformation(g);
  double geometric = 0;
  for (int k = 0; k < 5; ++k) geometric += std::pow(0.9, k);
  EXPECT_NEAR(r.root_value, geometric, 1e-12);
  EXPECT_LT(r.max_abs_diff_optimal, 1e-12);
}

TEST(Transformation, DeterministicChainMatchesExactly) {
  std::ifstream in(std::string(LTLMARL_SOURCE_DIR) + "/configs/chain.game");
  std::stringstream text;
  text << in.rdbuf();
  auto g = parse_game(text.str());
  auto r = verify_transformation(g);
  EXPECT_EQ(r.max_abs_diff_optimal, 0.0);
  EXPECT_EQ(r.max_abs_diff_uniform, 0.0);
  EXPECT_EQ(r.argmax_agreement, 1.0);
  // -1, then +1 on the two following steps
  EXPECT_NEAR(r.root_value, -1 + 0.9 + 0.81 + 0.729, 1e-12);
}

TEST(Transformation, RandomGamesAgree) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = verify_transformation(games::random_game(seed));
    EXPECT_LT(r.max_abs_diff_optimal, 1e-9) << seed;
    EXPECT_LT(r.max_abs_diff_uniform, 1e-9) << seed;
    EXPECT_EQ(r.argmax_agreement, 1.0) << seed;
  }
}

TEST(Transformation, RejectsOversizedOrMalformedGames) {
  EXPECT_THROW(parse_game("states 6\nagents 1\nactions 1\nformula F p\nhorizon 2\nprops p\n"),
               ltlmarl::DataError);
  EXPECT_THROW(parse_game("states 2\nagents 1\nactions 1\nprops p\nformula F p\nhorizon 7\n"),
               ltlmarl::DataError);
  EXPECT_THROW(parse_game("states 2\nagents 1\nactions 1\nprops p\nformula G p\nhorizon 2\n"),
               ltlmarl::DataError);
  EXPECT_THROW(parse_game("states 2\nagents 1\nactions 2\nprops p\nformula F p\nhorizon 2\n"
                          "trans 0 0 : 1 0.5 0 0.4\n"),
               ltlmarl::DataError);
  EXPECT_THROW(parse_game("states 2\nagents 1\nactions 1\nprops p\nhorizon 2\n"),
               ltlmarl::DataError);
  EXPECT_THROW(parse_game("states 2\nbogus 1\n"), ltlmarl::DataError);
}
