#pragma once

// Seeded tiny games for the transformation check.

#include <random>

#include "ltlmarl/shaping/transformation.hpp"
#include "support/ltl_corpus.hpp"

namespace games {

using ltlmarl::shaping::TabularGame;

/// Random stochastic game: `states` states, 2 agents with 2 actions each,
/// random labels over 3 props, and a random co-safe formula of depth <= 4.
inline TabularGame random_game(std::uint64_t seed, int states = 4, int horizon = 6) {
  std::mt19937_64 rng(seed);
  TabularGame g;
  g.num_states = states;
  g.num_agents = 2;
  g.num_actions = 2;
  g.props = corpus::props(3);
  g.horizon = horizon;
  g.gamma = 0.9;
  g.initial = 0;
  g.labels.resize(static_cast<std::size_t>(states));
  for (auto& l : g.labels) l = corpus::random_trace(rng, 1, g.props)[0];
  g.reset_transitions();
  std::uniform_int_distribution<int> pick_state(0, states - 1);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (auto& rows : g.transitions) {
    for (auto& row : rows) {
      row.clear();
      // one or two successors
      int a = pick_state(rng);
      int b = pick_state(rng);
      if (a == b || rng() % 2 == 0) {
        row.push_back({a, 1.0});
      } else {
        double p = unit(rng);
        p = std::min(p, 0.95);
        row.push_back({a, p});
        row.push_back({b, 1.0 - p});
      }
    }
  }
  do {
    g.formula = corpus::random_formula(rng, 4, g.props, corpus::Grammar::kCoSafe);
  } while (g.formula.is_constant());
  return g;
}

}  // namespace games
