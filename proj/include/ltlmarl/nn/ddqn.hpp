#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ltlmarl/nn/adam.hpp"
#include "ltlmarl/nn/dense.hpp"

namespace ltlmarl::nn {

/// Online and target networks plus the optimiser of the online one.
struct QPair {
  DenseNetwork online;
  DenseNetwork target;
  Adam optimizer;
  int sync_period = 100;
  long learn_steps = 0;

  QPair() = default;
  QPair(DenseNetwork net, int sync_every = 100, AdamConfig adam = {})
      : online(net), target(net), optimizer(net, adam), sync_period(sync_every) {}

  void sync() { target = online; }
};

/// Index of the largest entry among those allowed by `mask` (all when
/// empty); the lowest index wins ties.
inline int masked_argmax(const Vector& q, const std::vector<char>& mask = {}) {
  int best = -1;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (!mask.empty() && !mask[static_cast<std::size_t>(i)]) continue;
    if (best < 0 || q(i) > q(best)) best = static_cast<int>(i);
  }
  if (best < 0) throw std::invalid_argument("masked_argmax: nothing allowed");
  return best;
}

/// terminal: r. Otherwise r + gamma * target(s')[argmax_a online(s')[a]],
/// the argmax taken over `mask` when given.
inline double ddqn_target(const QPair& q, double reward, const Vector& next_state, double gamma,
                          bool terminal, const std::vector<char>& mask = {}) {
  if (terminal) return reward;
  int a = masked_argmax(q.online.forward(next_state), mask);
  return reward + gamma * q.target.forward(next_state)(a);
}

/// One squared-error step on the online network: loss is the mean over
/// the batch of (online(x_j)[a_j] - y_j)^2. Syncs the target every
/// `sync_period` calls. Returns the loss before the update.
inline double fit_batch(QPair& q, const Matrix& inputs, const std::vector<int>& actions,
                        const std::vector<double>& targets) {
  const Eigen::Index b = inputs.cols();
  if (static_cast<std::size_t>(b) != actions.size() || actions.size() != targets.size() || b == 0) {
    throw std::invalid_argument("fit_batch: batch sizes disagree");
  }
  Matrix out = q.online.forward_batch(inputs);
  Matrix d_out = Matrix::Zero(out.rows(), out.cols());
  double loss = 0;
  for (Eigen::Index j = 0; j < b; ++j) {
    double err = out(actions[static_cast<std::size_t>(j)], j) - targets[static_cast<std::size_t>(j)];
    loss += err * err;
    d_out(actions[static_cast<std::size_t>(j)], j) = 2.0 * err / static_cast<double>(b);
  }
  q.optimizer.step(q.online, q.online.backward(inputs, d_out));
  if (++q.learn_steps % q.sync_period == 0) q.sync();
  return loss / static_cast<double>(b);
}

}  // namespace ltlmarl::nn
