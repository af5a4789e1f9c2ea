#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ltlmarl/agent/agent.hpp"
#include "ltlmarl/curriculum/curriculum.hpp"
#include "ltlmarl/harness/config.hpp"
#include "ltlmarl/harness/experiments.hpp"
#include "ltlmarl/shaping/reward.hpp"
#include "ltlmarl/world/mapgen.hpp"
#include "ltlmarl/world/world.hpp"

namespace ltlmarl::harness {

/// Goal vocabulary: every proposition the world can emit except the clock,
/// in a fixed order. Goal indices refer to this list.
inline const std::vector<ltl::Proposition>& goal_vocabulary() {
  static const std::vector<ltl::Proposition> vocab = [] {
    const auto& ev = world::EventProps::get();
    std::vector<ltl::Proposition> v;
    for (auto k : world::kObjectKinds) {
      if (auto p = ev.on_enter[world::index_of(k)]) v.push_back(*p);
    }
    v.push_back(ev.at_shelter);
    return v;
  }();
  return vocab;
}

struct EvalRecord {
  long step = 0;
  std::vector<int> outcomes;  // +1 solved, -1 not, per task in order
  int total = 0;
  double wall_seconds = 0;
};

/// One agent's rewards on one training step, reported to the step hook.
struct StepRewards {
  long step = 0;
  std::size_t agent = 0;
  double base = 0;    // progression reward (or the ablation checker's)
  double shaped = 0;  // base + V_min - gamma V_max with the current values
  double used = 0;    // what entered the option return
};
using StepHook = std::function<void(const StepRewards&)>;

/// Episode horizon for a task set: the config value, or 160 steps (the
/// clock reaches night on the last one) when a task mentions is_night and
/// 300 otherwise.
inline int episode_horizon(const RunConfig& cfg, const std::vector<ltl::NamedTask>& tasks) {
  if (cfg.horizon > 0) return cfg.horizon;
  for (const auto& t : tasks) {
    if (mentions_night(t.formula)) return 160;
  }
  return 300;
}

/// Tasks may only mention world propositions, and the map must hold every
/// object kind they reference.
inline void check_compatible(const world::GridMap& map, int agents,
                             const std::vector<ltl::NamedTask>& tasks) {
  if (tasks.empty()) throw DataError("task set is empty");
  const auto& ev = world::EventProps::get();
  ltl::PropSet used;
  for (const auto& t : tasks) used = used | ltl::propositions(t.formula);
  for (auto p : used.members()) {
    if (!ev.all().contains(p)) {
      throw DataError("task proposition '" + p.name() + "' is not produced by the world");
    }
  }
  if (static_cast<int>(map.starts().size()) != agents) {
    throw DataError("map has " + std::to_string(map.starts().size()) + " start cells, run needs " +
                    std::to_string(agents));
  }
  map.validate(world::kinds_referenced(used));
}

/// Algorithm driver for one run: hierarchical agents, curriculum, shaping
/// and periodic greedy evaluation on the training map.
class Trainer {
 public:
  Trainer(RunConfig cfg, std::vector<ltl::NamedTask> tasks, world::GridMap map)
      : cfg_(std::move(cfg)),
        map_(std::move(map)),
        curriculum_(tasks, cfg_.curriculum_threshold),
        horizon_(episode_horizon(cfg_, tasks)) {
    validate(cfg_);
    check_compatible(map_, cfg_.agents, tasks);
    if (cfg_.paper_literal_always) prog_opt_.always = ltl::AlwaysRule::kPaperLiteral;
    for (const auto& t : tasks) {
      auto fe = final_event(t.formula);
      if (!cfg_.ltl_rewards && !fe) {
        throw DataError("task '" + t.name + "' has no crafting event for the ablation checker");
      }
      final_events_.push_back(fe);
    }
    agent::AgentConfig ac;
    ac.observation_size = world::observation_size(static_cast<std::size_t>(cfg_.agents));
    ac.num_goals = goal_vocabulary().size();
    ac.hidden = cfg_.hidden;
    ac.gamma = cfg_.gamma;
    ac.batch_size = static_cast<std::size_t>(cfg_.batch_size);
    ac.buffer_capacity = static_cast<std::size_t>(cfg_.buffer_capacity);
    ac.sync_period = cfg_.sync_period;
    ac.adam.learning_rate = cfg_.learning_rate;
    ac.meta_epsilon = {cfg_.eps_start, cfg_.eps_floor, cfg_.eps_decay};
    ac.controller_epsilon = ac.meta_epsilon;
    // Agent streams are derived from the run seed, one per agent.
    std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed), static_cast<std::uint32_t>(cfg_.seed >> 32)};
    std::vector<std::uint32_t> seeds(static_cast<std::size_t>(2 * cfg_.agents));
    seq.generate(seeds.begin(), seeds.end());
    for (int i = 0; i < cfg_.agents; ++i) {
      std::uint64_t s = (std::uint64_t{seeds[2 * i]} << 32) | seeds[2 * i + 1];
      agents_.emplace_back(ac, s);
    }
  }

  const RunConfig& config() const noexcept { return cfg_; }
  const world::GridMap& map() const noexcept { return map_; }
  const curriculum::Curriculum& curriculum() const noexcept { return curriculum_; }
  std::vector<agent::HierarchicalAgent>& agents() noexcept { return agents_; }
  int horizon() const noexcept { return horizon_; }
  long steps_done() const noexcept { return global_step_; }
  long episodes_done() const noexcept { return episodes_; }

  /// Trains for the configured number of primitive steps, evaluating every
  /// eval_period steps. `on_eval` sees every record as it is produced.
  std::vector<EvalRecord> run(const StepHook& hook = {},
                              const std::function<void(const EvalRecord&)>& on_eval = {}) {
    std::vector<EvalRecord> records;
    const auto t0 = std::chrono::steady_clock::now();
    while (global_step_ < cfg_.total_steps) {
      train_episode(hook, [&] {
        EvalRecord r = evaluate(global_step_);
        r.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_eval) on_eval(r);
        records.push_back(std::move(r));
      });
    }
    return records;
  }

  /// Greedy rollout of every task from the map's start state.
  EvalRecord evaluate(long at_step) {
    EvalRecord rec;
    rec.step = at_step;
    for (const auto& task : curriculum_.tasks()) {
      int o = rollout(task.formula) ? 1 : -1;
      rec.outcomes.push_back(o);
      rec.total += o;
    }
    return rec;
  }

 private:
  // Goals the meta-controller may pick given the current residual: the
  // positive goal propositions whose occurrence would change it. The clock
  // is part of the context so night-time constraints are respected.
  agent::GoalMask goal_mask(const shaping::TaskProgress& progress,
                            const world::WorldState& s) const {
    const auto& vocab = goal_vocabulary();
    agent::GoalMask all(vocab.size(), 1);
    if (!cfg_.ltl_rewards || progress.resolved()) return all;
    ltl::PropSet vocab_set;
    for (auto p : vocab) vocab_set.insert(p);
    ltl::PropSet positive = ltl::goal_propositions(progress.current) & vocab_set;
    ltl::LabelSet context = world::clock_labels(s);
    context.erase(world::EventProps::get().at_shelter);
    ltl::PropSet pick = ltl::progressing_propositions(progress.current, positive, context, prog_opt_);
    if (pick.empty()) pick = positive;
    if (pick.empty()) return all;
    agent::GoalMask m(vocab.size(), 0);
    for (std::size_t g = 0; g < vocab.size(); ++g) m[g] = pick.contains(vocab[g]) ? 1 : 0;
    return m;
  }

  // Picks goals for the agents flagged in `which`; in shared mode agent 0
  // decides for everyone.
  void choose_goals(std::vector<int>& goals, const std::vector<char>& which,
                    const std::vector<std::vector<double>>& obs, const agent::GoalMask& mask,
                    bool greedy) {
    if (cfg_.shared_goal) {
      if (!which[0]) return;
      int g = agents_[0].choose_goal(obs[0], mask, greedy);
      for (auto& x : goals) x = g;
      return;
    }
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      if (which[i]) goals[i] = agents_[i].choose_goal(obs[i], mask, greedy);
    }
  }

  // Events agent i caused itself: the object it now stands on (looked up
  // before consumption) and, for the shelter goal, standing on a shelter.
  static ltl::LabelSet own_events(const world::WorldState& before, const world::WorldState& after,
                                  std::size_t i) {
    const auto& ev = world::EventProps::get();
    ltl::LabelSet out;
    auto k = before.map.at(after.agents[i]);
    if (k == world::ObjectKind::kShelter) out.insert(ev.at_shelter);
    if (k != world::ObjectKind::kWall && k != world::ObjectKind::kEmpty) {
      if (auto p = ev.on_enter[world::index_of(k)]) out.insert(*p);
    }
    return out;
  }

  std::vector<std::vector<double>> observe(const world::WorldState& s) const {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < s.num_agents(); ++i) out.push_back(world::observation(s, i));
    return out;
  }

 public:
  /// Sees the state after every step of a greedy rollout and the goals
  /// that were in force for it.
  using RolloutObserver =
      std::function<void(const world::WorldState&, const std::vector<int>& goals)>;

  /// Greedy rollout of one task from the start state; true if satisfied
  /// within the horizon.
  bool rollout(const ltl::Formula& task, const RolloutObserver& observer = {}) {
    const std::size_t n = agents_.size();
    auto s = world::WorldState::initial(map_);
    auto progress = shaping::TaskProgress::start(task);
    auto obs = observe(s);
    std::vector<int> goals(n, 0);
    std::vector<char> all(n, 1);
    choose_goals(goals, all, obs, goal_mask(progress, s), true);
    std::vector<int> option_len(n, 0);
    for (int t = 0; t < horizon_ && !progress.resolved(); ++t) {
      std::vector<world::Action> actions;
      for (std::size_t i = 0; i < n; ++i) {
        actions.push_back(static_cast<world::Action>(agents_[i].choose_action(obs[i], goals[i], true)));
      }
      auto r = world::step(s, actions);
      progress = shaping::base_reward(progress, r.labels, prog_opt_).next;
      s = std::move(r.state);
      if (observer) observer(s, goals);
      obs = observe(s);
      std::vector<char> ended(n, 0);
      bool any = false;
      for (std::size_t i = 0; i < n; ++i) {
        ++option_len[i];
        if (r.labels.contains(goal_vocabulary()[static_cast<std::size_t>(goals[i])]) ||
            option_len[i] >= cfg_.option_steps) {
          ended[i] = 1;
          option_len[i] = 0;
          any = true;
        }
      }
      if (any && !progress.resolved()) choose_goals(goals, ended, obs, goal_mask(progress, s), true);
    }
    return progress.status == shaping::Status::kSatisfied;
  }

 private:
  template <class OnEval>
  void train_episode(const StepHook& hook, OnEval&& on_eval) {
    const std::size_t n = agents_.size();
    const auto& vocab = goal_vocabulary();
    const std::size_t task_index = curriculum_.next_task();
    const ltl::Formula& task = curriculum_.tasks()[task_index].formula;
    const auto final_prop = final_events_[task_index];

    auto s = world::WorldState::initial(map_);
    auto progress = shaping::TaskProgress::start(task);
    auto ev = shaping::EvaluationState::fresh(
        n, {cfg_.gamma, cfg_.xi, cfg_.v_init, cfg_.shaping});
    auto obs = observe(s);

    std::vector<int> goals(n, 0);
    choose_goals(goals, std::vector<char>(n, 1), obs, goal_mask(progress, s), false);
    std::vector<std::vector<double>> option_start = obs;
    std::vector<double> option_return(n, 0.0);
    std::vector<int> option_len(n, 0);
    agent::GoalMask pursued(vocab.size(), 0);
    for (int g : goals) pursued[static_cast<std::size_t>(g)] = 1;

    bool success = false;
    for (int t = 0; t < horizon_ && global_step_ < cfg_.total_steps; ++t) {
      std::vector<world::Action> actions;
      std::vector<int> action_ids;
      for (std::size_t i = 0; i < n; ++i) {
        action_ids.push_back(agents_[i].choose_action(obs[i], goals[i]));
        actions.push_back(static_cast<world::Action>(action_ids.back()));
      }
      auto r = world::step(s, actions);

      double base = -1;
      bool done = false;
      if (cfg_.ltl_rewards) {
        auto b = shaping::base_reward(progress, r.labels, prog_opt_);
        base = b.reward;
        progress = std::move(b.next);
        done = progress.resolved();
        success = progress.status == shaping::Status::kSatisfied;
      } else {
        success = final_prop && r.labels.contains(*final_prop);
        base = success ? 1.0 : -1.0;
        done = success;
      }
      ++global_step_;
      const bool last = done || t + 1 == horizon_ || global_step_ == cfg_.total_steps;
      const bool learn_tick = global_step_ % cfg_.learn_every == 0;
      auto next_obs = observe(r.state);

      std::vector<char> ended(n, 0);
      std::optional<agent::GoalMask> next_mask;
      for (std::size_t i = 0; i < n; ++i) {
        const auto goal_prop = vocab[static_cast<std::size_t>(goals[i])];
        const double intrinsic = agent::intrinsic_reward(goal_prop, own_events(s, r.state, i));
        agents_[i].remember(agent::ControllerTransition{obs[i], action_ids[i], goals[i], intrinsic,
                                                        next_obs[i], intrinsic > 0});
        const bool goal_fired = r.labels.contains(goal_prop);
        if (learn_tick) agents_[i].learn_controller();

        ev = shaping::update_value(std::move(ev), i, base);
        const double shaped = shaping::shaped_reward(base, ev, true);
        const double used = cfg_.shaping ? shaped : base;
        if (hook) hook({global_step_, i, base, shaped, used});
        option_return[i] += used;
        ++option_len[i];

        if (goal_fired || option_len[i] >= cfg_.option_steps || last) {
          if (!next_mask) {
            next_mask = last ? agent::GoalMask(vocab.size(), 1) : goal_mask(progress, r.state);
          }
          agents_[i].remember(agent::MetaTransition{option_start[i], goals[i], option_return[i],
                                                    next_obs[i], done, *next_mask});
          if (learn_tick) agents_[i].learn_meta();
          ended[i] = 1;
          option_start[i] = next_obs[i];
          option_return[i] = 0;
          option_len[i] = 0;
        }
      }

      s = std::move(r.state);
      obs = std::move(next_obs);
      if (!last && next_mask) {
        choose_goals(goals, ended, obs, *next_mask, false);
        for (int g : goals) pursued[static_cast<std::size_t>(g)] = 1;
      }
      if (global_step_ % cfg_.eval_period == 0) on_eval();
      if (done) break;
    }

    curriculum_.record_outcome(task_index, success);
    for (auto& a : agents_) a.end_episode(pursued);
    ++episodes_;
  }

  RunConfig cfg_;
  world::GridMap map_;
  curriculum::Curriculum curriculum_;
  int horizon_;
  ltl::ProgressionOptions prog_opt_{};
  std::vector<std::optional<ltl::Proposition>> final_events_;
  std::vector<agent::HierarchicalAgent> agents_;
  long global_step_ = 0;
  long episodes_ = 0;
};

}  // namespace ltlmarl::harness
