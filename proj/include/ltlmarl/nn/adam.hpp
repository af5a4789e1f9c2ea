#pragma once

#include <cmath>
#include <stdexcept>

#include "ltlmarl/nn/dense.hpp"

namespace ltlmarl::nn {

struct AdamConfig {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected adaptive moment optimiser. Moments mirror the parameter
/// layout of the network passed to the constructor.
class Adam {
 public:
  Adam() = default;
  Adam(const DenseNetwork& net, AdamConfig cfg = {})
      : cfg_(cfg), m_(net.zero_gradients()), v_(net.zero_gradients()) {}

  long steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return cfg_; }

  /// Applies one update in place. Throws std::domain_error (and leaves the
  /// network untouched) if any gradient entry is NaN or infinite.
  void step(DenseNetwork& net, const Gradients& g) {
    auto& layers = net.layers();
    if (g.size() != layers.size() || m_.size() != layers.size()) {
      throw std::invalid_argument("adam: gradient layout does not match the network");
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i].weight.rows() != layers[i].weight.rows() ||
          g[i].weight.cols() != layers[i].weight.cols() ||
          g[i].bias.size() != layers[i].bias.size()) {
        throw std::invalid_argument("adam: gradient shape mismatch in layer " + std::to_string(i));
      }
      if (!g[i].weight.allFinite() || !g[i].bias.allFinite()) {
        throw std::domain_error("adam: non-finite gradient in layer " + std::to_string(i));
      }
    }
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * grad;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
      param.array() -= cfg_.learning_rate * (m.array() / c1) /
                       ((v.array() / c2).sqrt() + cfg_.epsilon);
    };
    for (std::size_t i = 0; i < g.size(); ++i) {
      update(layers[i].weight, m_[i].weight, v_[i].weight, g[i].weight);
      update(layers[i].bias, m_[i].bias, v_[i].bias, g[i].bias);
    }
  }

 private:
  AdamConfig cfg_;
  Gradients m_;
  Gradients v_;
  long t_ = 0;
};

}  // namespace ltlmarl::nn
