#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ltlmarl/ltl/progression.hpp"

namespace ltlmarl::shaping {

enum class Status { kOpen, kSatisfied, kFalsified };

/// The running task formula and whether it has resolved.
struct TaskProgress {
  ltl::Formula current;
  Status status = Status::kOpen;

  static TaskProgress start(const ltl::Formula& task) {
    TaskProgress p{ltl::simplify(task), Status::kOpen};
    if (p.current.is_true()) p.status = Status::kSatisfied;
    if (p.current.is_false()) p.status = Status::kFalsified;
    return p;
  }
  bool resolved() const noexcept { return status != Status::kOpen; }
};

struct BaseReward {
  double reward;
  TaskProgress next;
};

/// +1 if the label set completes the task, -1 otherwise.
inline BaseReward base_reward(const TaskProgress& progress, ltl::LabelSet sigma,
                              const ltl::ProgressionOptions& opt = {}) {
  if (progress.resolved()) throw std::logic_error("base_reward: task already resolved");
  TaskProgress next{ltl::progress_simplified(sigma, progress.current, opt), Status::kOpen};
  if (next.current.is_true()) {
    next.status = Status::kSatisfied;
  } else if (next.current.is_false()) {
    next.status = Status::kFalsified;
  }
  return {next.status == Status::kSatisfied ? 1.0 : -1.0, std::move(next)};
}

struct ShapingConfig {
  double gamma = 0.9;
  double xi = 1.0;
  double v_init = 0.01;
  bool enabled = true;

  void validate() const {
    if (!(gamma >= 0 && gamma <= 1)) throw std::invalid_argument("shaping gamma must be in [0, 1]");
    if (!(xi >= 0 && xi <= 1)) throw std::invalid_argument("shaping xi must be in [0, 1]");
    if (!std::isfinite(v_init)) throw std::invalid_argument("shaping v_init must be finite");
  }
};

/// Per-agent evaluation values V_j with the recursion parameters.
struct EvaluationState {
  std::vector<double> values;
  double xi = 1.0;
  double gamma = 0.9;

  static EvaluationState fresh(std::size_t num_agents, const ShapingConfig& cfg) {
    return {std::vector<double>(num_agents, cfg.v_init), cfg.xi, cfg.gamma};
  }
};

/// V_i <- xi * (r + gamma * V_i); other agents untouched.
inline EvaluationState update_value(EvaluationState ev, std::size_t agent, double reward) {
  if (agent >= ev.values.size()) throw std::out_of_range("update_value: agent index");
  double& v = ev.values[agent];
  v = ev.xi * (reward + ev.gamma * v);
  return ev;
}

/// base + min V - gamma * max V, or base when shaping is off.
inline double shaped_reward(double base, const EvaluationState& ev, bool enabled = true) {
  if (!enabled) return base;
  if (ev.values.empty()) throw std::invalid_argument("shaped_reward: no agents");
  auto [lo, hi] = std::minmax_element(ev.values.begin(), ev.values.end());
  return base + *lo - ev.gamma * *hi;
}

}  // namespace ltlmarl::shaping
