#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "ltlmarl/error.hpp"
#include "ltlmarl/ltl/progression.hpp"
#include "ltlmarl/world/grid.hpp"

namespace ltlmarl::world {

/// How many cells of each sensed kind to place, indexed like kObjectKinds.
using KindCounts = std::array<int, kNumObjectKinds>;

inline constexpr KindCounts kDefaultCounts{4, 4, 4, 2, 2, 2, 2};
inline constexpr KindCounts kDeskCounts{1, 1, 1, 1, 1, 1, 1};

/// Walled `width` x `height` map with the requested objects placed on
/// distinct interior cells and `num_agents` distinct start poses on the
/// remaining empty interior cells. Same arguments give the same map.
inline GridMap random_map(std::uint64_t seed, int width, int height,
                          const KindCounts& counts = kDefaultCounts,
                          std::size_t num_agents = 2) {
  GridMap map(width, height);
  map.set_seed(seed);
  std::vector<Cell> interior;
  for (int y = 1; y + 1 < height; ++y) {
    for (int x = 1; x + 1 < width; ++x) interior.push_back({x, y});
  }
  std::size_t needed = num_agents;
  for (int c : counts) {
    if (c < 0) throw DataError("object counts must be non-negative");
    needed += static_cast<std::size_t>(c);
  }
  if (needed > interior.size()) {
    throw DataError("requested " + std::to_string(needed) + " objects and agents but the map has " +
                    std::to_string(interior.size()) + " interior cells");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(interior.begin(), interior.end(), rng);
  std::size_t next = 0;
  for (std::size_t k = 0; k < kNumObjectKinds; ++k) {
    for (int n = 0; n < counts[k]; ++n) map.set(interior[next++], kObjectKinds[k]);
  }
  std::vector<Cell> starts(interior.begin() + static_cast<long>(next),
                           interior.begin() + static_cast<long>(next + num_agents));
  map.set_starts(std::move(starts));
  return map;
}

// ---------------------------------------------------------------------------
// Plan abstraction used to score maps.
//
// A task is reduced to visits of "target" cells: cells of every kind whose
// got_/used_ proposition occurs positively in the formula. Agents travel
// along BFS shortest paths (walls block, objects do not) and an event fires
// only on arrival at a target; cells passed on the way are ignored. A
// material fires once, on the first arrival. All arrivals at the same time
// form one label set. The formula is progressed at each arrival time, with
// empty-label steps in between iterated until nothing changes. The cost of a
// plan is the time at which the formula becomes true. The clock and shelter
// are not modelled. Agents never wait and never target their current cell.
//
// Greedy: whenever an agent is free it commits to the nearest target that is
// "enabled" (its proposition alone changes one progression step of the
// current formula), unconsumed, and not the destination of another agent.
// Ties go by distance, then kind order, then row-major cell. An agent with
// no such target stops for good.
//
// Optimal: the minimum cost over all per-agent target sequences whose total
// length is at most the number of positive proposition occurrences in the
// formula, found by branch and bound seeded with the greedy cost.
// ---------------------------------------------------------------------------

inline constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

/// BFS step distances from `from` to every cell; kUnreachable where blocked.
inline std::vector<int> bfs_distances(const GridMap& map, Cell from) {
  std::vector<int> dist(static_cast<std::size_t>(map.width() * map.height()), kUnreachable);
  auto idx = [&map](Cell c) { return static_cast<std::size_t>(c.y * map.width() + c.x); };
  std::deque<Cell> queue{from};
  dist[idx(from)] = 0;
  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop_front();
    for (Cell d : {Cell{0, -1}, Cell{0, 1}, Cell{-1, 0}, Cell{1, 0}}) {
      Cell n{c.x + d.x, c.y + d.y};
      if (!map.walkable(n) || dist[idx(n)] != kUnreachable) continue;
      dist[idx(n)] = dist[idx(c)] + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

class PlanModel {
 public:
  PlanModel(const GridMap& map, const ltl::Formula& task)
      : task_(ltl::simplify(task)), num_agents_(map.starts().size()) {
    const auto& ev = EventProps::get();
    const ltl::PropSet goals = ltl::goal_propositions(task_);
    for (auto k : kObjectKinds) {
      auto p = ev.on_enter[index_of(k)];
      if (!p || !goals.contains(*p)) continue;
      for (Cell c : map.cells_of(k)) targets_.push_back({c, k, *p});
    }
    // Nodes 0..T-1 are targets, T..T+N-1 are agent starts.
    std::vector<Cell> nodes;
    for (const auto& t : targets_) nodes.push_back(t.cell);
    for (Cell s : map.starts()) nodes.push_back(s);
    const std::size_t n = nodes.size();
    dist_.assign(n * n, kUnreachable);
    for (std::size_t a = 0; a < n; ++a) {
      auto d = bfs_distances(map, nodes[a]);
      for (std::size_t b = 0; b < n; ++b) {
        dist_[a * n + b] = d[static_cast<std::size_t>(nodes[b].y * map.width() + nodes[b].x)];
      }
    }
    budget_ = positive_occurrences(task_);
  }

  struct Target {
    Cell cell;
    ObjectKind kind;
    ltl::Proposition prop;
  };

  const std::vector<Target>& targets() const noexcept { return targets_; }
  std::size_t num_agents() const noexcept { return num_agents_; }
  std::size_t start_node(std::size_t agent) const { return targets_.size() + agent; }
  int distance(std::size_t from_node, std::size_t to_node) const {
    return dist_[from_node * (targets_.size() + num_agents_) + to_node];
  }
  /// Total number of visits the optimal search may schedule.
  int visit_budget() const noexcept { return budget_; }
  const ltl::Formula& task() const noexcept { return task_; }

  /// Cost of fixed per-agent visit sequences (target indices), or
  /// kUnreachable if the formula never becomes true.
  int cost(const std::vector<std::vector<std::size_t>>& plan) const {
    struct Arrival {
      int time;
      std::size_t target;
    };
    std::vector<Arrival> arrivals;
    for (std::size_t a = 0; a < plan.size(); ++a) {
      std::size_t at = start_node(a);
      int t = 0;
      for (std::size_t target : plan[a]) {
        int d = distance(at, target);
        if (d >= kUnreachable) return kUnreachable;
        t += d;
        arrivals.push_back({t, target});
        at = target;
      }
    }
    std::sort(arrivals.begin(), arrivals.end(),
              [](const Arrival& x, const Arrival& y) { return x.time < y.time; });
    std::vector<char> consumed(targets_.size(), 0);
    ltl::Formula f = task_;
    int now = 0;
    for (std::size_t i = 0; i < arrivals.size();) {
      const int t = arrivals[i].time;
      f = idle(f, t - now - 1);
      ltl::LabelSet labels;
      for (; i < arrivals.size() && arrivals[i].time == t; ++i) {
        std::size_t target = arrivals[i].target;
        if (is_material(targets_[target].kind)) {
          if (consumed[target] == 1) continue;
          consumed[target] = 2;  // consumed at this instant
        }
        labels.insert(targets_[target].prop);
      }
      for (auto& c : consumed) c = c ? 1 : 0;
      f = ltl::progress_simplified(labels, f);
      now = t;
      if (f.is_true()) return t;
      if (f.is_false()) return kUnreachable;
    }
    return kUnreachable;
  }

  /// Greedy cost under the commitment rule described above.
  int greedy_cost() const {
    const std::size_t n = num_agents_;
    std::vector<std::size_t> at(n);
    std::vector<std::optional<std::size_t>> heading(n);
    std::vector<int> arrive(n, 0);
    std::vector<char> stopped(n, 0);
    for (std::size_t a = 0; a < n; ++a) at[a] = start_node(a);
    std::vector<char> consumed(targets_.size(), 0);
    ltl::Formula f = task_;
    int now = 0;
    while (true) {
      // Free agents choose in index order.
      for (std::size_t a = 0; a < n; ++a) {
        if (stopped[a] || heading[a]) continue;
        auto choice = greedy_choice(f, at[a], heading, consumed);
        if (!choice) {
          stopped[a] = 1;
          continue;
        }
        heading[a] = *choice;
        arrive[a] = now + distance(at[a], *choice);
      }
      int t = kUnreachable;
      for (std::size_t a = 0; a < n; ++a) {
        if (heading[a]) t = std::min(t, arrive[a]);
      }
      if (t >= kUnreachable) return kUnreachable;
      f = idle(f, t - now - 1);
      ltl::LabelSet labels;
      for (std::size_t a = 0; a < n; ++a) {
        if (!heading[a] || arrive[a] != t) continue;
        std::size_t target = *heading[a];
        if (!is_material(targets_[target].kind) || !consumed[target]) {
          labels.insert(targets_[target].prop);
        }
        if (is_material(targets_[target].kind)) consumed[target] = 1;
        at[a] = target;
        heading[a].reset();
      }
      f = ltl::progress_simplified(labels, f);
      now = t;
      if (f.is_true()) return t;
      if (f.is_false()) return kUnreachable;
    }
  }

  /// Optimal cost over plans within the visit budget.
  int optimal_cost() const {
    int best = greedy_cost();
    std::vector<std::vector<std::size_t>> plan(num_agents_);
    search(plan, 0, 0, 0, start_node(0), best);
    return best;
  }

 private:
  static int positive_occurrences(const ltl::Formula& f, bool positive = true) {
    switch (f.op()) {
      case ltl::Op::kTrue:
      case ltl::Op::kFalse:
        return 0;
      case ltl::Op::kProp:
        return positive ? 1 : 0;
      case ltl::Op::kNot:
        return positive_occurrences(f.left(), !positive);
      default: {
        int n = positive_occurrences(f.left(), positive);
        if (ltl::arity(f.op()) == 2) n += positive_occurrences(f.right(), positive);
        return n;
      }
    }
  }

  /// `steps` empty-label progressions, stopping early at a fixpoint.
  static ltl::Formula idle(ltl::Formula f, int steps) {
    for (int i = 0; i < steps; ++i) {
      ltl::Formula g = ltl::progress_simplified({}, f);
      if (g == f) break;
      f = g;
    }
    return f;
  }

  std::optional<std::size_t> greedy_choice(const ltl::Formula& f, std::size_t from,
                                           const std::vector<std::optional<std::size_t>>& heading,
                                           const std::vector<char>& consumed) const {
    const ltl::Formula baseline = ltl::progress_simplified({}, f);
    std::optional<std::size_t> best;
    int best_d = kUnreachable;
    for (std::size_t t = 0; t < targets_.size(); ++t) {
      if (t == from || consumed[t]) continue;
      if (std::find(heading.begin(), heading.end(), std::optional<std::size_t>(t)) !=
          heading.end()) {
        continue;
      }
      int d = distance(from, t);
      if (d >= kUnreachable) continue;
      if (ltl::progress_simplified(ltl::LabelSet{targets_[t].prop}, f) == baseline) continue;
      bool better = !best || d < best_d ||
                    (d == best_d && (index_of(targets_[t].kind) < index_of(targets_[*best].kind) ||
                                     (targets_[t].kind == targets_[*best].kind &&
                                      targets_[t].cell < targets_[*best].cell)));
      if (better) {
        best = t;
        best_d = d;
      }
    }
    return best;
  }

  // Extends agent `agent`'s sequence; `elapsed` is its arrival time at
  // `at`. Every complete assignment is scored with `cost`. A visit that
  // arrives at or after `best` cannot lower the cost, so it is not taken.
  void search(std::vector<std::vector<std::size_t>>& plan, std::size_t agent, int used,
              int elapsed, std::size_t at, int& best) const {
    if (agent + 1 < num_agents_) {
      search(plan, agent + 1, used, 0, start_node(agent + 1), best);
    } else {
      best = std::min(best, cost(plan));
    }
    if (used >= budget_) return;
    for (std::size_t t = 0; t < targets_.size(); ++t) {
      if (t == at) continue;
      int d = distance(at, t);
      if (d >= kUnreachable || elapsed + d >= best) continue;
      plan[agent].push_back(t);
      search(plan, agent, used + 1, elapsed + d, t, best);
      plan[agent].pop_back();
    }
  }

  ltl::Formula task_;
  std::size_t num_agents_;
  std::vector<Target> targets_;
  std::vector<int> dist_;
  int budget_ = 0;
};

struct CandidateScore {
  std::uint64_t seed = 0;
  int greedy = kUnreachable;
  int optimal = kUnreachable;
  /// greedy / optimal; +inf when only greedy fails.
  double ratio = 0;
  bool achievable() const { return optimal < kUnreachable; }
};

inline CandidateScore score_map(const GridMap& map, const ltl::Formula& task) {
  PlanModel model(map, task);
  CandidateScore s;
  s.seed = map.seed();
  s.greedy = model.greedy_cost();
  s.optimal = model.optimal_cost();
  if (s.achievable()) {
    s.ratio = s.greedy >= kUnreachable ? std::numeric_limits<double>::infinity()
                                       : static_cast<double>(s.greedy) / s.optimal;
  }
  return s;
}

struct AdversarialResult {
  GridMap map;
  CandidateScore chosen;
  std::vector<CandidateScore> candidates;
};

/// Index of the achievable candidate with the highest ratio, earliest first
/// on ties; nullopt if none is achievable.
inline std::optional<std::size_t> highest_ratio(const std::vector<CandidateScore>& candidates) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].achievable()) continue;
    if (!best || candidates[i].ratio > candidates[*best].ratio) best = i;
  }
  return best;
}

/// Scores one random map per seed and returns the one with the highest
/// greedy-to-optimal ratio; ties go to the earliest seed in `seeds`.
inline AdversarialResult adversarial_select(const std::vector<std::uint64_t>& seeds,
                                            const ltl::Formula& task, int width = 21,
                                            int height = 21,
                                            const KindCounts& counts = kDefaultCounts,
                                            std::size_t num_agents = 2) {
  AdversarialResult result;
  for (std::uint64_t seed : seeds) {
    result.candidates.push_back(
        score_map(random_map(seed, width, height, counts, num_agents), task));
  }
  auto best = highest_ratio(result.candidates);
  if (!best) throw DataError("task is not achievable on any candidate map");
  result.chosen = result.candidates[*best];
  result.map = random_map(result.chosen.seed, width, height, counts, num_agents);
  return result;
}

}  // namespace ltlmarl::world
