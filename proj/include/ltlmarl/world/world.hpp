#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ltlmarl/ltl/formula.hpp"
#include "ltlmarl/world/grid.hpp"

namespace ltlmarl::world {

enum class Action : std::uint8_t { kUp, kDown, kLeft, kRight };
inline constexpr std::size_t kNumActions = 4;

constexpr Cell offset(Action a) {
  switch (a) {
    case Action::kUp: return {0, -1};
    case Action::kDown: return {0, 1};
    case Action::kLeft: return {-1, 0};
    case Action::kRight: return {1, 0};
  }
  return {0, 0};
}

inline constexpr int kStartHour = 5;
inline constexpr int kNightHour = 21;
inline constexpr int kStepsPerHour = 10;

/// Hour of day after `steps` joint steps; day starts at 5:00.
constexpr int clock_hour(int steps) { return kStartHour + steps / kStepsPerHour; }

/// Joint Markov state. Copying is cheap; `step` returns a fresh value.
struct WorldState {
  GridMap map;
  std::vector<AgentPose> agents;
  int step_count = 0;

  static WorldState initial(const GridMap& map) {
    map.validate();
    return WorldState{map, map.starts(), 0};
  }

  int hour() const { return clock_hour(step_count); }
  std::size_t num_agents() const { return agents.size(); }

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

/// Labels of the state an agent set reaches, without consuming anything.
/// Used by `step` and to compute context propositions for a fresh state.
inline ltl::LabelSet clock_labels(const WorldState& s) {
  const auto& ev = EventProps::get();
  ltl::LabelSet out;
  if (s.hour() >= kNightHour) out.insert(ev.is_night);
  bool all_sheltered = !s.agents.empty();
  for (auto a : s.agents) all_sheltered = all_sheltered && s.map.at(a) == ObjectKind::kShelter;
  if (all_sheltered) out.insert(ev.at_shelter);
  return out;
}

struct StepResult {
  WorldState state;
  ltl::LabelSet labels;
};

/// One joint step. Agents move in index order but do not block each other;
/// a move into a wall or off the map leaves the agent in place. Materials
/// under any agent are consumed after labels are collected.
inline StepResult step(const WorldState& s, const std::vector<Action>& actions) {
  if (actions.size() != s.agents.size()) {
    throw std::invalid_argument("step: expected " + std::to_string(s.agents.size()) +
                                " actions, got " + std::to_string(actions.size()));
  }
  const auto& ev = EventProps::get();
  StepResult r{s, {}};
  WorldState& n = r.state;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    Cell d = offset(actions[i]);
    Cell to{n.agents[i].x + d.x, n.agents[i].y + d.y};
    if (n.map.walkable(to)) n.agents[i] = to;
  }
  n.step_count = s.step_count + 1;
  r.labels = clock_labels(n);
  for (auto a : n.agents) {
    ObjectKind k = n.map.at(a);
    if (k == ObjectKind::kWall || k == ObjectKind::kEmpty) continue;
    if (auto p = ev.on_enter[index_of(k)]) r.labels.insert(*p);
  }
  for (auto a : n.agents) {
    if (is_material(n.map.at(a))) n.map.set(a, ObjectKind::kEmpty);
  }
  return r;
}

/// Nearest cell of kind `k` by Manhattan distance, ties broken row-major.
inline std::optional<Cell> nearest(const GridMap& map, Cell from, ObjectKind k) {
  std::optional<Cell> best;
  int best_d = 0;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (map.at({x, y}) != k) continue;
      int d = manhattan(from, {x, y});
      if (!best || d < best_d) {
        best = Cell{x, y};
        best_d = d;
      }
    }
  }
  return best;
}

/// Raw feature layout for agent i of N:
///   [0, 7)          Manhattan distance to the nearest wood, grass, iron,
///                   toolshed, workbench, factory, shelter; -1 if none remain
///   [7, 7+2(N-1))   (dx, dy) of every other agent, in index order
///   last            clock, (hour - 5) / 16 clamped to [0, 1]
inline std::size_t feature_size(std::size_t num_agents) {
  return kNumObjectKinds + 2 * (num_agents - 1) + 1;
}

inline std::vector<double> features(const WorldState& s, std::size_t agent) {
  if (agent >= s.agents.size()) throw std::out_of_range("features: agent index");
  std::vector<double> out;
  out.reserve(feature_size(s.agents.size()));
  const Cell me = s.agents[agent];
  for (auto k : kObjectKinds) {
    auto c = nearest(s.map, me, k);
    out.push_back(c ? manhattan(me, *c) : -1.0);
  }
  for (std::size_t j = 0; j < s.agents.size(); ++j) {
    if (j == agent) continue;
    out.push_back(s.agents[j].x - me.x);
    out.push_back(s.agents[j].y - me.y);
  }
  double clock = static_cast<double>(s.hour() - kStartHour) / (kNightHour - kStartHour);
  out.push_back(clock < 0 ? 0 : (clock > 1 ? 1 : clock));
  return out;
}

/// Network input for agent i: the raw features with distances and offsets
/// scaled by 1 / (width + height), then for each object kind the signs of
/// (dx, dy) towards its nearest instance (0, 0 when none remain), then the
/// agent's own position scaled to [0, 1]. Distances alone are symmetric
/// under reflection, so the signs are what lets a controller pick a
/// direction.
inline std::size_t observation_size(std::size_t num_agents) {
  return feature_size(num_agents) + 2 * kNumObjectKinds + 2;
}

inline std::vector<double> observation(const WorldState& s, std::size_t agent) {
  std::vector<double> out = features(s, agent);
  const double scale = 1.0 / (s.map.width() + s.map.height());
  const std::size_t n_scaled = out.size() - 1;
  for (std::size_t i = 0; i < n_scaled; ++i) {
    if (i < kNumObjectKinds && out[i] < 0) continue;
    out[i] *= scale;
  }
  const Cell me = s.agents[agent];
  auto sign = [](int v) { return static_cast<double>((v > 0) - (v < 0)); };
  for (auto k : kObjectKinds) {
    auto c = nearest(s.map, me, k);
    out.push_back(c ? sign(c->x - me.x) : 0.0);
    out.push_back(c ? sign(c->y - me.y) : 0.0);
  }
  out.push_back(static_cast<double>(me.x) / (s.map.width() - 1));
  out.push_back(static_cast<double>(me.y) / (s.map.height() - 1));
  return out;
}

}  // namespace ltlmarl::world
