#pragma once

// Numerical check that a task-rewarded game keeps its action values when the
// reward is made Markovian by pairing states with progressed formulas.
//
// Game file (UTF-8, `#` comments, one directive per line):
//
//   states 3                 # states are 0..n-1
//   agents 2
//   actions 2                # per agent
//   props p q
//   label 1 p q              # label set of a state; unlisted states emit {}
//   trans 0 1 0 : 2          # state, one action per agent, ':' successor
//   trans 0 1 1 : 1 0.5 2 0.5   # or successor/probability pairs
//   formula F (p & F q)
//   horizon 4
//   gamma 0.9
//   initial 0
//
// Joint actions without a `trans` line stay in place. Rewards are earned on
// entering a state: the label of the initial state is not part of the trace.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ltlmarl/error.hpp"
#include "ltlmarl/ltl/evaluate.hpp"
#include "ltlmarl/ltl/parser.hpp"
#include "ltlmarl/ltl/progression.hpp"

namespace ltlmarl::shaping {

struct GameLimits {
  static constexpr int kStates = 5;
  static constexpr int kAgents = 2;
  static constexpr int kActions = 3;
  static constexpr int kProps = 3;
  static constexpr int kHorizon = 6;
};

struct TabularGame {
  int num_states = 0;
  int num_agents = 0;
  int num_actions = 0;
  std::vector<ltl::Proposition> props;
  std::vector<ltl::LabelSet> labels;  // per state
  /// transitions[s][joint] = (successor, probability) pairs
  std::vector<std::vector<std::vector<std::pair<int, double>>>> transitions;
  ltl::Formula formula;
  int horizon = 0;
  double gamma = 0.9;
  int initial = 0;

  int num_joint_actions() const {
    int n = 1;
    for (int i = 0; i < num_agents; ++i) n *= num_actions;
    return n;
  }

  /// Sets every transition to a self-loop. Call after the sizes are known.
  void reset_transitions() {
    transitions.assign(static_cast<std::size_t>(num_states),
                       std::vector<std::vector<std::pair<int, double>>>(
                           static_cast<std::size_t>(num_joint_actions())));
    for (int s = 0; s < num_states; ++s) {
      for (auto& row : transitions[static_cast<std::size_t>(s)]) row = {{s, 1.0}};
    }
  }

  /// Throws DataError when the game is malformed or too large to enumerate.
  void validate() const {
    auto fail = [](const std::string& m) { throw DataError("game: " + m); };
    if (num_states < 1 || num_states > GameLimits::kStates) fail("states must be in 1..5");
    if (num_agents < 1 || num_agents > GameLimits::kAgents) fail("agents must be in 1..2");
    if (num_actions < 1 || num_actions > GameLimits::kActions) fail("actions must be in 1..3");
    if (props.size() > static_cast<std::size_t>(GameLimits::kProps)) fail("at most 3 props");
    if (horizon < 1 || horizon > GameLimits::kHorizon) fail("horizon must be in 1..6");
    if (!(gamma >= 0 && gamma <= 1)) fail("gamma must be in [0, 1]");
    if (initial < 0 || initial >= num_states) fail("initial state out of range");
    if (!ltl::is_cosafe(formula)) fail("formula must be co-safe");
    ltl::PropSet declared;
    for (auto p : props) declared.insert(p);
    if (!ltl::propositions(formula).is_subset_of(declared)) fail("formula uses undeclared props");
    for (const auto& rows : transitions) {
      for (const auto& row : rows) {
        double total = 0;
        for (auto [to, p] : row) {
          if (to < 0 || to >= num_states || !(p >= 0)) fail("bad transition entry");
          total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) fail("transition probabilities must sum to 1");
      }
    }
  }
};

inline TabularGame parse_game(const std::string& text) {
  TabularGame g;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool have_formula = false;
  struct Pending {
    int line;
    std::vector<std::string> words;
  };
  std::vector<Pending> labels, trans;
  auto fail = [&line_no](const std::string& m) {
    throw DataError("game line " + std::to_string(line_no) + ": " + m);
  };
  auto to_int = [&fail](const std::string& w) {
    try {
      std::size_t used = 0;
      int v = std::stoi(w, &used);
      if (used != w.size()) fail("expected an integer, got '" + w + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("expected an integer, got '" + w + "'");
    }
    return 0;
  };
  auto to_double = [&fail](const std::string& w) {
    try {
      std::size_t used = 0;
      double v = std::stod(w, &used);
      if (used != w.size()) fail("expected a number, got '" + w + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("expected a number, got '" + w + "'");
    }
    return 0.0;
  };
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream words(raw);
    std::string key;
    if (!(words >> key)) continue;
    std::vector<std::string> rest;
    for (std::string w; words >> w;) rest.push_back(w);
    auto one = [&]() -> const std::string& {
      if (rest.size() != 1) fail("'" + key + "' takes exactly one value");
      return rest[0];
    };
    if (key == "states") {
      g.num_states = to_int(one());
    } else if (key == "agents") {
      g.num_agents = to_int(one());
    } else if (key == "actions") {
      g.num_actions = to_int(one());
    } else if (key == "props") {
      for (const auto& w : rest) g.props.push_back(ltl::Proposition::intern(w));
    } else if (key == "label") {
      labels.push_back({line_no, rest});
    } else if (key == "trans") {
      trans.push_back({line_no, rest});
    } else if (key == "formula") {
      auto pos = raw.find("formula");
      g.formula = ltl::parse(raw.substr(pos + 7), line_no, static_cast<int>(pos + 8));
      have_formula = true;
    } else if (key == "horizon") {
      g.horizon = to_int(one());
    } else if (key == "gamma") {
      g.gamma = to_double(one());
    } else if (key == "initial") {
      g.initial = to_int(one());
    } else {
      fail("unknown directive '" + key + "'");
    }
  }
  if (!have_formula) throw DataError("game: missing formula");
  if (g.num_states < 1 || g.num_states > GameLimits::kStates || g.num_agents < 1 ||
      g.num_agents > GameLimits::kAgents || g.num_actions < 1 ||
      g.num_actions > GameLimits::kActions) {
    g.validate();  // reports the offending size
  }
  g.labels.assign(static_cast<std::size_t>(g.num_states), {});
  for (const auto& l : labels) {
    line_no = l.line;
    if (l.words.empty()) fail("label needs a state");
    int s = to_int(l.words[0]);
    if (s < 0 || s >= g.num_states) fail("state out of range");
    for (std::size_t i = 1; i < l.words.size(); ++i) {
      auto p = ltl::Proposition::intern(l.words[i]);
      if (std::find(g.props.begin(), g.props.end(), p) == g.props.end()) {
        fail("undeclared prop '" + l.words[i] + "'");
      }
      g.labels[static_cast<std::size_t>(s)].insert(p);
    }
  }
  g.reset_transitions();
  for (const auto& t : trans) {
    line_no = t.line;
    auto colon = std::find(t.words.begin(), t.words.end(), ":");
    if (colon == t.words.end()) fail("trans needs ':'");
    std::size_t lhs = static_cast<std::size_t>(colon - t.words.begin());
    if (lhs != static_cast<std::size_t>(1 + g.num_agents)) fail("trans needs a state and one action per agent");
    int s = to_int(t.words[0]);
    if (s < 0 || s >= g.num_states) fail("state out of range");
    int joint = 0;
    for (int i = 0; i < g.num_agents; ++i) {
      int a = to_int(t.words[static_cast<std::size_t>(1 + i)]);
      if (a < 0 || a >= g.num_actions) fail("action out of range");
      joint = joint * g.num_actions + a;
    }
    std::vector<std::string> rhs(colon + 1, t.words.end());
    std::vector<std::pair<int, double>> row;
    if (rhs.size() == 1) {
      row.push_back({to_int(rhs[0]), 1.0});
    } else if (!rhs.empty() && rhs.size() % 2 == 0) {
      for (std::size_t i = 0; i < rhs.size(); i += 2) {
        row.push_back({to_int(rhs[i]), to_double(rhs[i + 1])});
      }
    } else {
      fail("trans successor list must be one state or state/probability pairs");
    }
    g.transitions[static_cast<std::size_t>(s)][static_cast<std::size_t>(joint)] = row;
  }
  g.validate();
  return g;
}

struct TransformationReport {
  /// Histories (state sequences from the initial state) compared.
  std::size_t histories = 0;
  /// max |Q_history - Q_product| under optimal play.
  double max_abs_diff_optimal = 0;
  /// Same under the uniform random joint policy.
  double max_abs_diff_uniform = 0;
  /// Fraction of histories whose sets of optimal joint actions coincide.
  double argmax_agreement = 1;
  /// Optimal value of the initial state, history side.
  double root_value = 0;
};

namespace detail {

enum class Backup { kMax, kMean };

inline double backup(const std::vector<double>& q, Backup mode) {
  if (mode == Backup::kMax) return *std::max_element(q.begin(), q.end());
  double sum = 0;
  for (double v : q) sum += v;
  return sum / static_cast<double>(q.size());
}

// Q over state histories with the reward read off the whole label trace.
class HistorySide {
 public:
  HistorySide(const TabularGame& g, Backup mode) : g_(g), mode_(mode) {}

  // Q(h, .) for history `states` (states[0] is the initial state).
  std::vector<double> q(const std::vector<int>& states) {
    auto it = memo_.find(states);
    if (it != memo_.end()) return it->second;
    const int t = static_cast<int>(states.size()) - 1;
    std::vector<double> out(static_cast<std::size_t>(g_.num_joint_actions()), 0.0);
    for (int a = 0; a < g_.num_joint_actions(); ++a) {
      double total = 0;
      for (auto [to, p] : g_.transitions[static_cast<std::size_t>(states.back())]
                                        [static_cast<std::size_t>(a)]) {
        if (p == 0) continue;
        std::vector<int> next = states;
        next.push_back(to);
        ltl::Trace trace;
        for (std::size_t k = 1; k < next.size(); ++k) {
          trace.push_back(g_.labels[static_cast<std::size_t>(next[k])]);
        }
        double r = ltl::evaluate(trace, 0, g_.formula) ? 1.0 : -1.0;
        double future = t + 1 < g_.horizon ? backup(q(next), mode_) : 0.0;
        total += p * (r + g_.gamma * future);
      }
      out[static_cast<std::size_t>(a)] = total;
    }
    memo_.emplace(states, out);
    return out;
  }

 private:
  const TabularGame& g_;
  Backup mode_;
  std::map<std::vector<int>, std::vector<double>> memo_;
};

// Q over (state, residual formula, time) with reward +1 iff the progressed
// formula is true.
class ProductSide {
 public:
  ProductSide(const TabularGame& g, Backup mode) : g_(g), mode_(mode) {}

  std::vector<double> q(int s, const ltl::Formula& residual, int t) {
    Key key{s, residual, t};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<double> out(static_cast<std::size_t>(g_.num_joint_actions()), 0.0);
    for (int a = 0; a < g_.num_joint_actions(); ++a) {
      double total = 0;
      for (auto [to, p] :
           g_.transitions[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]) {
        if (p == 0) continue;
        ltl::Formula next = ltl::progress(g_.labels[static_cast<std::size_t>(to)], residual);
        double r = next.is_true() ? 1.0 : -1.0;
        double future = t + 1 < g_.horizon ? backup(q(to, next, t + 1), mode_) : 0.0;
        total += p * (r + g_.gamma * future);
      }
      out[static_cast<std::size_t>(a)] = total;
    }
    memo_.emplace(key, out);
    return out;
  }

 private:
  struct Key {
    int s;
    ltl::Formula f;
    int t;
    bool operator==(const Key& o) const { return s == o.s && t == o.t && f == o.f; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return ltl::FormulaHash{}(k.f) * 31 + static_cast<std::size_t>(k.s * 8 + k.t);
    }
  };
  const TabularGame& g_;
  Backup mode_;
  std::unordered_map<Key, std::vector<double>, KeyHash> memo_;
};

inline std::vector<int> argmax_set(const std::vector<double>& q, double tol) {
  double best = *std::max_element(q.begin(), q.end());
  std::vector<int> out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] >= best - tol) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace detail

/// Walks every reachable state history up to the horizon and compares the
/// action values of the history-rewarded game with those of the product
/// game, for optimal play and for the uniform random policy.
inline TransformationReport verify_transformation(const TabularGame& game) {
  game.validate();
  detail::HistorySide hist_opt(game, detail::Backup::kMax), hist_uni(game, detail::Backup::kMean);
  detail::ProductSide prod_opt(game, detail::Backup::kMax), prod_uni(game, detail::Backup::kMean);
  TransformationReport report;
  std::size_t agree = 0;
  struct Frame {
    std::vector<int> states;
    ltl::Formula residual;
  };
  std::vector<Frame> stack{{{game.initial}, ltl::simplify(game.formula)}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const int t = static_cast<int>(f.states.size()) - 1;
    auto qh = hist_opt.q(f.states);
    auto qp = prod_opt.q(f.states.back(), f.residual, t);
    auto uh = hist_uni.q(f.states);
    auto up = prod_uni.q(f.states.back(), f.residual, t);
    for (std::size_t a = 0; a < qh.size(); ++a) {
      report.max_abs_diff_optimal = std::max(report.max_abs_diff_optimal, std::abs(qh[a] - qp[a]));
      report.max_abs_diff_uniform = std::max(report.max_abs_diff_uniform, std::abs(uh[a] - up[a]));
    }
    agree += detail::argmax_set(qh, 1e-9) == detail::argmax_set(qp, 1e-9);
    ++report.histories;
    if (t == 0) report.root_value = *std::max_element(qh.begin(), qh.end());
    if (t + 1 >= game.horizon) continue;
    std::vector<int> successors;
    for (const auto& row : game.transitions[static_cast<std::size_t>(f.states.back())]) {
      for (auto [to, p] : row) {
        if (p > 0) successors.push_back(to);
      }
    }
    std::sort(successors.begin(), successors.end());
    successors.erase(std::unique(successors.begin(), successors.end()), successors.end());
    for (int to : successors) {
      Frame next{f.states, ltl::progress(game.labels[static_cast<std::size_t>(to)], f.residual)};
      next.states.push_back(to);
      stack.push_back(std::move(next));
    }
  }
  report.argmax_agreement = static_cast<double>(agree) / static_cast<double>(report.histories);
  return report;
}

}  // namespace ltlmarl::shaping
