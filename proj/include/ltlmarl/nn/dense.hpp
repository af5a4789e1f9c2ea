#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltlmarl::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
           a.weight == b.weight && a.bias == b.bias;
  }
};

/// Gradients have exactly the parameter layout.
using Gradients = std::vector<DenseLayer>;

/// Fully connected network: rectifier on hidden layers, identity output.
/// Batched calls take one sample per column.
class DenseNetwork {
 public:
  DenseNetwork() = default;

  /// Zero-initialised network with the given layer widths, input first.
  explicit DenseNetwork(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("network needs at least two layer sizes");
    for (int s : sizes_) {
      if (s < 1) throw std::invalid_argument("layer sizes must be positive");
    }
    for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
      layers_.push_back({Matrix::Zero(sizes_[i + 1], sizes_[i]), Vector::Zero(sizes_[i + 1])});
    }
  }

  /// Uniform fan-in initialisation in [-1/sqrt(in), 1/sqrt(in)].
  template <class Rng>
  static DenseNetwork random(std::vector<int> sizes, Rng& rng) {
    DenseNetwork net(std::move(sizes));
    for (auto& l : net.layers_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(l.weight.cols()));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) l.weight(r, c) = u(rng);
      }
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = u(rng);
    }
    return net;
  }

  const std::vector<int>& sizes() const noexcept { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

  std::size_t num_parameters() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  Vector forward(const Vector& x) const {
    check_input(x.size());
    Vector h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Vector z = layers_[i].weight * h + layers_[i].bias;
      h = i + 1 < layers_.size() ? Vector(z.cwiseMax(0.0)) : z;
    }
    return h;
  }

  Matrix forward_batch(const Matrix& x) const {
    check_input(x.rows());
    Matrix h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Matrix z = (layers_[i].weight * h).colwise() + layers_[i].bias;
      h = i + 1 < layers_.size() ? Matrix(z.cwiseMax(0.0)) : z;
    }
    return h;
  }

  /// Parameter gradients of sum_over_batch <d_out, net(x)>, i.e. reverse
  /// mode with `d_out` the loss gradient at the outputs (one column each).
  Gradients backward(const Matrix& x, const Matrix& d_out) const {
    check_input(x.rows());
    if (d_out.rows() != output_size() || d_out.cols() != x.cols()) {
      throw std::invalid_argument("backward: output gradient has the wrong shape");
    }
    const std::size_t n = layers_.size();
    std::vector<Matrix> acts{x};  // acts[i] is the input of layer i
    std::vector<Matrix> pre;
    for (std::size_t i = 0; i < n; ++i) {
      Matrix z = (layers_[i].weight * acts.back()).colwise() + layers_[i].bias;
      pre.push_back(z);
      if (i + 1 < n) acts.push_back(z.cwiseMax(0.0));
    }
    Gradients grads(n);
    Matrix delta = d_out;
    for (std::size_t i = n; i-- > 0;) {
      if (i + 1 < n) delta = delta.cwiseProduct((pre[i].array() > 0.0).cast<double>().matrix());
      grads[i].weight = delta * acts[i].transpose();
      grads[i].bias = delta.rowwise().sum();
      if (i > 0) delta = layers_[i].weight.transpose() * delta;
    }
    return grads;
  }

  Gradients zero_gradients() const {
    Gradients g;
    for (const auto& l : layers_) {
      g.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
    }
    return g;
  }

  friend bool operator==(const DenseNetwork& a, const DenseNetwork& b) {
    return a.sizes_ == b.sizes_ && a.layers_ == b.layers_;
  }

 private:
  void check_input(Eigen::Index rows) const {
    if (layers_.empty()) throw std::logic_error("network has no layers");
    if (rows != input_size()) {
      throw std::invalid_argument("input has " + std::to_string(rows) + " entries, network expects " +
                                  std::to_string(input_size()));
    }
  }

  std::vector<int> sizes_;
  std::vector<DenseLayer> layers_;
};

}  // namespace ltlmarl::nn
