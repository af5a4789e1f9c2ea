#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltlmarl/agent/replay.hpp"
#include "ltlmarl/agent/schedule.hpp"
#include "ltlmarl/ltl/formula.hpp"
#include "ltlmarl/nn/checkpoint.hpp"
#include "ltlmarl/nn/ddqn.hpp"

namespace ltlmarl::agent {

/// Goals are indices into a fixed proposition vocabulary shared by all
/// agents of a run. Masks are one flag per vocabulary entry.
using GoalMask = std::vector<char>;

struct AgentConfig {
  std::size_t observation_size = 0;
  std::size_t num_goals = 0;
  std::size_t num_actions = 4;
  std::vector<int> hidden{64, 64};
  double gamma = 0.9;
  std::size_t batch_size = 32;
  std::size_t buffer_capacity = 25000;
  int sync_period = 100;
  nn::AdamConfig adam{};
  EpsilonConfig meta_epsilon{};
  EpsilonConfig controller_epsilon{};
};

struct ControllerTransition {
  std::vector<double> state;
  int action = 0;
  int goal = 0;
  double reward = 0;  // 1 when the goal event fired, else 0
  std::vector<double> next_state;
  bool terminal = false;
};

struct MetaTransition {
  std::vector<double> start_state;
  int goal = 0;
  double reward = 0;  // summed shaped reward over the option
  std::vector<double> end_state;
  bool terminal = false;
  GoalMask next_goals;  // goals available at end_state
};

inline double intrinsic_reward(ltl::Proposition goal, ltl::LabelSet sigma) {
  return sigma.contains(goal) ? 1.0 : 0.0;
}

inline nn::Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const nn::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Controller input: observation followed by a one-hot goal block.
inline nn::Vector controller_input(const std::vector<double>& obs, int goal, std::size_t num_goals) {
  nn::Vector x = nn::Vector::Zero(static_cast<Eigen::Index>(obs.size() + num_goals));
  x.head(static_cast<Eigen::Index>(obs.size())) = to_vector(obs);
  x(static_cast<Eigen::Index>(obs.size()) + goal) = 1.0;
  return x;
}

/// Epsilon-greedy over the goals allowed by `mask`; greedy ties go to the
/// lowest index.
template <class Rng>
int select_goal(const nn::QPair& meta, const std::vector<double>& obs, const GoalMask& mask,
                double epsilon, Rng& rng) {
  std::vector<int> allowed;
  for (std::size_t g = 0; g < mask.size(); ++g) {
    if (mask[g]) allowed.push_back(static_cast<int>(g));
  }
  if (allowed.empty()) throw std::invalid_argument("select_goal: empty goal set");
  // No draw at epsilon 0, so greedy calls leave the stream untouched.
  if (epsilon > 0 && std::uniform_real_distribution<double>(0, 1)(rng) < epsilon) {
    return allowed[std::uniform_int_distribution<std::size_t>(0, allowed.size() - 1)(rng)];
  }
  return nn::masked_argmax(meta.online.forward(to_vector(obs)), mask);
}

/// Epsilon-greedy primitive action for the controller under `goal`.
template <class Rng>
int select_action(const nn::QPair& controller, const std::vector<double>& obs, int goal,
                  std::size_t num_goals, double epsilon, Rng& rng) {
  const int n = controller.online.output_size();
  if (epsilon > 0 && std::uniform_real_distribution<double>(0, 1)(rng) < epsilon) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
  }
  return nn::masked_argmax(controller.online.forward(controller_input(obs, goal, num_goals)));
}

/// One hierarchical learner: meta-controller over goals, goal-conditioned
/// controller over primitive actions, one replay buffer for each, and the
/// exploration schedules.
class HierarchicalAgent {
 public:
  HierarchicalAgent(const AgentConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        rng_(seed),
        d1_(cfg.buffer_capacity),
        d2_(cfg.buffer_capacity),
        meta_eps_(cfg.meta_epsilon),
        goal_eps_(cfg.num_goals, EpsilonSchedule(cfg.controller_epsilon)) {
    if (cfg.observation_size == 0 || cfg.num_goals == 0) {
      throw std::invalid_argument("agent needs a positive observation size and goal count");
    }
    auto sizes = [&](int in, int out) {
      std::vector<int> s{in};
      s.insert(s.end(), cfg.hidden.begin(), cfg.hidden.end());
      s.push_back(out);
      return s;
    };
    const int obs = static_cast<int>(cfg.observation_size);
    controller_ = nn::QPair(
        nn::DenseNetwork::random(sizes(obs + static_cast<int>(cfg.num_goals),
                                       static_cast<int>(cfg.num_actions)),
                                 rng_),
        cfg.sync_period, cfg.adam);
    meta_ = nn::QPair(nn::DenseNetwork::random(sizes(obs, static_cast<int>(cfg.num_goals)), rng_),
                      cfg.sync_period, cfg.adam);
  }

  const AgentConfig& config() const noexcept { return cfg_; }
  nn::QPair& controller() noexcept { return controller_; }
  nn::QPair& meta() noexcept { return meta_; }
  const nn::QPair& controller() const noexcept { return controller_; }
  const nn::QPair& meta() const noexcept { return meta_; }
  ReplayBuffer<ControllerTransition>& controller_buffer() noexcept { return d1_; }
  ReplayBuffer<MetaTransition>& meta_buffer() noexcept { return d2_; }
  EpsilonSchedule& meta_epsilon() noexcept { return meta_eps_; }
  EpsilonSchedule& goal_epsilon(int goal) { return goal_eps_.at(static_cast<std::size_t>(goal)); }
  std::mt19937_64& rng() noexcept { return rng_; }

  /// `greedy` forces epsilon 0 (evaluation).
  int choose_goal(const std::vector<double>& obs, const GoalMask& mask, bool greedy = false) {
    return select_goal(meta_, obs, mask, greedy ? 0.0 : meta_eps_.value(), rng_);
  }
  int choose_action(const std::vector<double>& obs, int goal, bool greedy = false) {
    double eps = greedy ? 0.0 : goal_epsilon(goal).value();
    return select_action(controller_, obs, goal, cfg_.num_goals, eps, rng_);
  }

  void remember(ControllerTransition t) { d1_.push(std::move(t)); }
  void remember(MetaTransition t) { d2_.push(std::move(t)); }

  /// One DDQN step on a batch from the controller buffer; false (and no
  /// change) while the buffer holds fewer than a batch.
  bool learn_controller() {
    auto batch = d1_.sample(cfg_.batch_size, rng_);
    if (batch.empty()) return false;
    const auto b = static_cast<Eigen::Index>(batch.size());
    const auto in = static_cast<Eigen::Index>(cfg_.observation_size + cfg_.num_goals);
    nn::Matrix x(in, b), x_next(in, b);
    std::vector<int> actions;
    for (Eigen::Index j = 0; j < b; ++j) {
      const auto& t = *batch[static_cast<std::size_t>(j)];
      x.col(j) = controller_input(t.state, t.goal, cfg_.num_goals);
      x_next.col(j) = controller_input(t.next_state, t.goal, cfg_.num_goals);
      actions.push_back(t.action);
    }
    std::vector<double> targets = ddqn_targets(controller_, x_next, batch, {});
    nn::fit_batch(controller_, x, actions, targets);
    return true;
  }

  /// Same for the meta-controller; the bootstrap argmax is restricted to
  /// the goals that were available at the end of the option.
  bool learn_meta() {
    auto batch = d2_.sample(cfg_.batch_size, rng_);
    if (batch.empty()) return false;
    const auto b = static_cast<Eigen::Index>(batch.size());
    const auto in = static_cast<Eigen::Index>(cfg_.observation_size);
    nn::Matrix x(in, b), x_next(in, b);
    std::vector<int> goals;
    std::vector<const GoalMask*> masks;
    for (Eigen::Index j = 0; j < b; ++j) {
      const auto& t = *batch[static_cast<std::size_t>(j)];
      x.col(j) = to_vector(t.start_state);
      x_next.col(j) = to_vector(t.end_state);
      goals.push_back(t.goal);
      masks.push_back(&t.next_goals);
    }
    std::vector<double> targets = ddqn_targets(meta_, x_next, batch, masks);
    nn::fit_batch(meta_, x, goals, targets);
    return true;
  }

  /// Anneals the meta schedule and the schedules of the goals in `pursued`.
  void end_episode(const GoalMask& pursued) {
    meta_eps_.anneal();
    for (std::size_t g = 0; g < goal_eps_.size() && g < pursued.size(); ++g) {
      if (pursued[g]) goal_eps_[g].anneal();
    }
  }

  // Checkpoint: both Q pairs plus exploration positions.
  void save(std::ostream& out) const {
    out << "ltlmarl-agent 1\n" << std::hexfloat << "meta_epsilon " << meta_eps_.value() << '\n';
    out << "goal_epsilon " << goal_eps_.size();
    for (const auto& e : goal_eps_) out << ' ' << e.value();
    out << '\n' << std::defaultfloat;
    for (const nn::QPair* q : {&controller_, &meta_}) {
      out << "learn_steps " << q->learn_steps << '\n';
      nn::write_network(out, q->online);
      nn::write_network(out, q->target);
    }
  }

  void load(std::istream& in) {
    nn::detail::expect_word(in, "ltlmarl-agent");
    int version = 0;
    if (!(in >> version) || version != 1) throw DataError("agent checkpoint: unsupported version");
    nn::detail::expect_word(in, "meta_epsilon");
    meta_eps_.restore(nn::detail::read_real(in));
    nn::detail::expect_word(in, "goal_epsilon");
    std::size_t n = 0;
    if (!(in >> n) || n != goal_eps_.size()) throw DataError("agent checkpoint: goal count");
    for (auto& e : goal_eps_) e.restore(nn::detail::read_real(in));
    for (nn::QPair* q : {&controller_, &meta_}) {
      nn::detail::expect_word(in, "learn_steps");
      if (!(in >> q->learn_steps)) throw DataError("agent checkpoint: learn_steps");
      auto online = nn::read_network(in);
      auto target = nn::read_network(in);
      if (online.sizes() != q->online.sizes() || target.sizes() != q->online.sizes()) {
        throw DataError("agent checkpoint: network shape does not match the run");
      }
      q->online = std::move(online);
      q->target = std::move(target);
    }
  }

 private:
  // Batched DDQN targets: online picks the argmax, target evaluates it.
  template <class T>
  std::vector<double> ddqn_targets(const nn::QPair& q, const nn::Matrix& x_next,
                                   const std::vector<const T*>& batch,
                                   const std::vector<const GoalMask*>& masks) const {
    nn::Matrix online = q.online.forward_batch(x_next);
    nn::Matrix target = q.target.forward_batch(x_next);
    std::vector<double> out;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      const auto& t = *batch[j];
      if (t.terminal) {
        out.push_back(t.reward);
        continue;
      }
      const auto col = static_cast<Eigen::Index>(j);
      int a = nn::masked_argmax(online.col(col), masks.empty() ? GoalMask{} : *masks[j]);
      out.push_back(t.reward + cfg_.gamma * target(a, col));
    }
    return out;
  }

  AgentConfig cfg_;
  std::mt19937_64 rng_;
  nn::QPair controller_;
  nn::QPair meta_;
  ReplayBuffer<ControllerTransition> d1_;
  ReplayBuffer<MetaTransition> d2_;
  EpsilonSchedule meta_eps_;
  std::vector<EpsilonSchedule> goal_eps_;
};

}  // namespace ltlmarl::agent
