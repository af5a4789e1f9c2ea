#pragma once

// Standalone re-computation of the greedy and optimal plan costs used for
// adversarial map selection. Shares only the map type, the event names and
// LTL progression/evaluation with the library; distances, simulation, the
// greedy rule and the search are re-derived here. The optimal search is a
// plain enumeration of every pair of visit sequences with no pruning.
//
// Restricted to two agents and Next-free tasks: without Next, inserting
// empty steps between events does not change satisfaction, so the earliest
// satisfying time can be read off the compressed event trace.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "ltlmarl/ltl/evaluate.hpp"
#include "ltlmarl/ltl/progression.hpp"
#include "ltlmarl/world/grid.hpp"

namespace oracle {

using ltlmarl::ltl::Formula;
using ltlmarl::ltl::LabelSet;
using ltlmarl::world::Cell;
using ltlmarl::world::GridMap;
using ltlmarl::world::ObjectKind;

inline constexpr int kNever = std::numeric_limits<int>::max();

struct Spot {
  Cell cell;
  ObjectKind kind;
  ltlmarl::ltl::Proposition prop;
  bool consumable;
};

class PlanOracle {
 public:
  PlanOracle(const GridMap& map, const Formula& task) : map_(map), task_(task) {
    const auto& ev = ltlmarl::world::EventProps::get();
    auto wanted = ltlmarl::ltl::goal_propositions(task);
    for (int y = 0; y < map.height(); ++y) {
      for (int x = 0; x < map.width(); ++x) {
        ObjectKind k = map.at({x, y});
        if (k == ObjectKind::kWall || k == ObjectKind::kEmpty) continue;
        auto p = ev.on_enter[ltlmarl::world::index_of(k)];
        if (p && wanted.contains(*p)) spots_.push_back({{x, y}, k, *p, ltlmarl::world::is_material(k)});
      }
    }
    // Spots are visited in kind order in the greedy tie rule, so keep a
    // kind-major, row-major listing.
    std::stable_sort(spots_.begin(), spots_.end(), [](const Spot& a, const Spot& b) {
      return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
    all_pairs();
    budget_ = count_positive(task, true);
  }

  const std::vector<Spot>& spots() const { return spots_; }
  int budget() const { return budget_; }

  /// Shortest walking distance between two cells.
  int dist(Cell a, Cell b) const { return d_[id(a)][id(b)]; }

  /// Earliest time the task holds when agent k visits seqs[k] in order.
  int cost(const std::vector<std::vector<int>>& seqs) const {
    std::map<int, std::vector<int>> by_time;
    for (std::size_t k = 0; k < seqs.size(); ++k) {
      Cell at = map_.starts()[k];
      int t = 0;
      for (int s : seqs[k]) {
        int d = dist(at, spots_[s].cell);
        if (d == kNever) return kNever;
        t += d;
        by_time[t].push_back(s);
        at = spots_[s].cell;
      }
    }
    std::vector<char> gone(spots_.size(), 0);
    ltlmarl::ltl::Trace trace;
    std::vector<int> times;
    for (const auto& [t, visits] : by_time) {
      LabelSet labels;
      std::vector<int> newly;
      for (int s : visits) {
        if (spots_[s].consumable && gone[s]) continue;
        labels.insert(spots_[s].prop);
        if (spots_[s].consumable) newly.push_back(s);
      }
      for (int s : newly) gone[s] = 1;
      trace.push_back(labels);
      times.push_back(t);
    }
    for (std::size_t n = 1; n <= trace.size(); ++n) {
      ltlmarl::ltl::Trace prefix(trace.begin(), trace.begin() + static_cast<long>(n));
      if (ltlmarl::ltl::evaluate(prefix, 0, task_)) return times[n - 1];
    }
    return kNever;
  }

  /// Exhaustive minimum over sequence pairs with |A| + |B| <= budget, no two
  /// consecutive visits to the same spot.
  int optimal() const {
    std::vector<std::vector<int>> all;
    std::vector<int> cur;
    grow(cur, budget_, all);
    int best = kNever;
    for (const auto& a : all) {
      for (const auto& b : all) {
        if (a.size() + b.size() > static_cast<std::size_t>(budget_)) continue;
        best = std::min(best, cost({a, b}));
      }
    }
    return best;
  }

  /// Event-driven greedy: free agents (lowest index first) commit to the
  /// closest unconsumed, unclaimed spot whose event would change the next
  /// progression step. Agents with nothing to do stop.
  int greedy() const {
    const std::size_t n = map_.starts().size();
    std::vector<Cell> pos = map_.starts();
    std::vector<int> goal(n, -1), eta(n, 0);
    std::vector<char> out(n, 0), gone(spots_.size(), 0);
    Formula f = ltlmarl::ltl::simplify(task_);
    int clock = 0;
    for (;;) {
      for (std::size_t k = 0; k < n; ++k) {
        if (out[k] || goal[k] >= 0) continue;
        Formula idle = ltlmarl::ltl::progress({}, f);
        int pick = -1;
        for (int s = 0; s < static_cast<int>(spots_.size()); ++s) {
          if (gone[s] || spots_[s].cell == pos[k]) continue;
          if (std::find(goal.begin(), goal.end(), s) != goal.end()) continue;
          if (dist(pos[k], spots_[s].cell) == kNever) continue;
          if (ltlmarl::ltl::progress(LabelSet{spots_[s].prop}, f) == idle) continue;
          if (pick < 0) {
            pick = s;
            continue;
          }
          int ds = dist(pos[k], spots_[s].cell), dp = dist(pos[k], spots_[pick].cell);
          // kind-major listing makes the first strictly-closer spot the winner
          bool closer = ds < dp || (ds == dp && spots_[s].kind == spots_[pick].kind &&
                                    spots_[s].cell < spots_[pick].cell);
          if (closer) pick = s;
        }
        if (pick < 0) {
          out[k] = 1;
          continue;
        }
        goal[k] = pick;
        eta[k] = clock + dist(pos[k], spots_[pick].cell);
      }
      int t = kNever;
      for (std::size_t k = 0; k < n; ++k) {
        if (goal[k] >= 0) t = std::min(t, eta[k]);
      }
      if (t == kNever) return kNever;
      for (int i = clock + 1; i < t; ++i) f = ltlmarl::ltl::progress({}, f);
      LabelSet labels;
      for (std::size_t k = 0; k < n; ++k) {
        if (goal[k] < 0 || eta[k] != t) continue;
        const Spot& s = spots_[goal[k]];
        if (!(s.consumable && gone[goal[k]])) labels.insert(s.prop);
        if (s.consumable) gone[goal[k]] = 1;
        pos[k] = s.cell;
        goal[k] = -1;
      }
      f = ltlmarl::ltl::progress(labels, f);
      clock = t;
      if (f.is_true()) return t;
      if (f.is_false()) return kNever;
    }
  }

 private:
  std::size_t id(Cell c) const { return static_cast<std::size_t>(c.y * map_.width() + c.x); }

  // Floyd-Warshall over all walkable cells.
  void all_pairs() {
    const std::size_t n = static_cast<std::size_t>(map_.width() * map_.height());
    d_.assign(n, std::vector<int>(n, kNever));
    for (int y = 0; y < map_.height(); ++y) {
      for (int x = 0; x < map_.width(); ++x) {
        if (!map_.walkable({x, y})) continue;
        d_[id({x, y})][id({x, y})] = 0;
        const Cell nbrs[] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
        for (Cell nb : nbrs) {
          if (map_.walkable(nb)) d_[id({x, y})][id(nb)] = 1;
        }
      }
    }
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t i = 0; i < n; ++i) {
        if (d_[i][m] == kNever) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (d_[m][j] == kNever) continue;
          d_[i][j] = std::min(d_[i][j], d_[i][m] + d_[m][j]);
        }
      }
    }
  }

  void grow(std::vector<int>& cur, int left, std::vector<std::vector<int>>& all) const {
    all.push_back(cur);
    if (left == 0) return;
    for (int s = 0; s < static_cast<int>(spots_.size()); ++s) {
      if (!cur.empty() && cur.back() == s) continue;
      cur.push_back(s);
      grow(cur, left - 1, all);
      cur.pop_back();
    }
  }

  static int count_positive(const Formula& f, bool pos) {
    using ltlmarl::ltl::Op;
    switch (f.op()) {
      case Op::kProp: return pos ? 1 : 0;
      case Op::kTrue:
      case Op::kFalse: return 0;
      case Op::kNot: return count_positive(f.left(), !pos);
      default:
        return count_positive(f.left(), pos) +
               (ltlmarl::ltl::arity(f.op()) == 2 ? count_positive(f.right(), pos) : 0);
    }
  }

  GridMap map_;
  Formula task_;
  std::vector<Spot> spots_;
  std::vector<std::vector<int>> d_;
  int budget_ = 0;
};

struct Verdict {
  std::uint64_t seed;
  int greedy;
  int optimal;
  double ratio;
};

inline Verdict judge(const GridMap& map, const Formula& task) {
  PlanOracle o(map, task);
  Verdict v{map.seed(), o.greedy(), o.optimal(), 0.0};
  if (v.optimal != kNever) {
    v.ratio = v.greedy == kNever ? std::numeric_limits<double>::infinity()
                                 : static_cast<double>(v.greedy) / v.optimal;
  }
  return v;
}

}  // namespace oracle
