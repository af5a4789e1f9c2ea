#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ltlmarl/nn/adam.hpp"
#include "ltlmarl/nn/checkpoint.hpp"
#include "ltlmarl/nn/ddqn.hpp"
#include "ltlmarl/nn/dense.hpp"
#include "support/finite_diff.hpp"

using namespace ltlmarl::nn;

TEST(Forward, ZeroNetworkGivesZeros) {
  DenseNetwork net({5, 64, 64, 4});
  Vector x = Vector::Random(5);
  EXPECT_EQ(net.forward(x), Vector::Zero(4));
}

TEST(Forward, SingleAffineUnit) {
  DenseNetwork net({1, 1});
  net.layers()[0].weight(0, 0) = 2;
  net.layers()[0].bias(0) = 1;
  EXPECT_EQ(net.forward(Vector::Constant(1, 3.0))(0), 7.0);
}

TEST(Forward, MatchesNaiveLoops) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto net = DenseNetwork::random({6, 64, 64, 4}, rng);
    std::normal_distribution<double> n(0, 1);
    std::vector<double> x(6);
    for (auto& v : x) v = n(rng);
    Vector ex = Eigen::Map<Vector>(x.data(), 6);
    auto got = net.forward(ex);
    auto want = fd::naive_forward(net, x);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(got(i), want[static_cast<std::size_t>(i)], 1e-12);
    Matrix batch = ex.replicate(1, 3);
    auto b = net.forward_batch(batch);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(b(i, 2), want[static_cast<std::size_t>(i)], 1e-12);
  }
}

TEST(Forward, ShapeMismatchThrows) {
  DenseNetwork net({3, 2});
  EXPECT_THROW(net.forward(Vector::Zero(4)), std::invalid_argument);
  EXPECT_THROW(net.backward(Matrix::Zero(3, 2), Matrix::Zero(2, 1)), std::invalid_argument);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(1);
  auto net = DenseNetwork::random({4, 8, 3}, rng);
  auto g = net.backward(Matrix::Random(4, 5), Matrix::Zero(3, 5));
  for (const auto& l : g) {
    EXPECT_TRUE(l.weight.isZero(0));
    EXPECT_TRUE(l.bias.isZero(0));
  }
}

TEST(Backward, DeadUnitPassesNoGradient) {
  DenseNetwork net({1, 2, 1});
  net.layers()[0].weight << 1, -1;
  net.layers()[1].weight << 1, 1;
  Matrix x = Matrix::Constant(1, 1, 2.0);  // unit 1 pre-activation -2
  auto g = net.backward(x, Matrix::Ones(1, 1));
  EXPECT_EQ(g[0].weight(1, 0), 0.0);
  EXPECT_EQ(g[0].bias(1), 0.0);
  EXPECT_EQ(g[1].weight(0, 1), 0.0);
  EXPECT_EQ(g[0].weight(0, 0), 2.0);
}

TEST(Backward, MatchesCentralDifferences) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = fd::random_case(rng);
    EXPECT_LT(fd::max_gradient_error(c.net, c.x, c.w, 1e-5), 1e-4) << trial;
  }
}

TEST(Adam, ZeroGradientLeavesParametersAndCountsStep) {
  std::mt19937_64 rng(2);
  auto net = DenseNetwork::random({3, 4, 2}, rng);
  auto before = net;
  Adam opt(net);
  opt.step(net, net.zero_gradients());
  EXPECT_EQ(net, before);
  EXPECT_EQ(opt.steps(), 1);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  DenseNetwork net({1, 1});
  Adam opt(net);
  auto g = net.zero_gradients();
  g[0].weight(0, 0) = 1;
  opt.step(net, g);
  EXPECT_NEAR(net.layers()[0].weight(0, 0), -5e-4, 1e-10);
}

TEST(Adam, ReducesAQuadratic) {
  std::mt19937_64 rng(3);
  auto net = DenseNetwork::random({2, 1}, rng);
  Matrix x = Matrix::Random(2, 16);
  Matrix y = Matrix::Random(1, 16);
  auto loss = [&] { return (net.forward_batch(x) - y).squaredNorm(); };
  Adam opt(net, {0.01});
  const double start = loss();
  for (int i = 0; i < 200; ++i) opt.step(net, net.backward(x, 2 * (net.forward_batch(x) - y)));
  EXPECT_LT(loss(), start);
}

TEST(Adam, NonFiniteGradientThrows) {
  DenseNetwork net({1, 1});
  Adam opt(net);
  auto g = net.zero_gradients();
  g[0].bias(0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(opt.step(net, g), std::domain_error);
  EXPECT_EQ(opt.steps(), 0);
}

TEST(Ddqn, TargetRules) {
  DenseNetwork net({1, 3});
  QPair q(net);
  EXPECT_EQ(ddqn_target(q, 1.0, Vector::Zero(1), 0.9, true), 1.0);
  // online prefers action 2; target values (0, 5, 2)
  q.online.layers()[0].bias << 0, 1, 3;
  q.target.layers()[0].bias << 0, 5, 2;
  EXPECT_DOUBLE_EQ(ddqn_target(q, 0.0, Vector::Zero(1), 0.9, false), 1.8);
  // masking out action 2 moves the argmax to action 1
  EXPECT_DOUBLE_EQ(ddqn_target(q, 0.0, Vector::Zero(1), 0.9, false, {1, 1, 0}), 4.5);
  q.sync();
  EXPECT_DOUBLE_EQ(ddqn_target(q, 0.5, Vector::Zero(1), 0.9, false), 0.5 + 0.9 * 3);
}

TEST(Ddqn, SyncIsIdempotent) {
  std::mt19937_64 rng(5);
  QPair q(DenseNetwork::random({3, 8, 2}, rng));
  q.online = DenseNetwork::random({3, 8, 2}, rng);
  q.sync();
  auto once = q.target;
  q.sync();
  EXPECT_EQ(q.target, once);
  EXPECT_EQ(q.target, q.online);
}

TEST(Ddqn, FitBatchConvergesOnAFrozenTransition) {
  std::mt19937_64 rng(6);
  QPair q(DenseNetwork::random({4, 16, 16, 3}, rng));
  Matrix x = Matrix::Random(4, 1).replicate(1, 32);
  std::vector<int> a(32, 1);
  std::vector<double> y(32, 0.7);
  for (int i = 0; i < 2000; ++i) fit_batch(q, x, a, y);
  EXPECT_NEAR(q.online.forward(x.col(0))(1), 0.7, 1e-2);
  EXPECT_EQ(q.learn_steps, 2000);
  EXPECT_EQ(q.target, q.online);  // 2000 is a multiple of the sync period
}

TEST(Checkpoint, ReloadIsBitExact) {
  std::mt19937_64 rng(7);
  auto net = DenseNetwork::random({5, 64, 64, 4}, rng);
  std::stringstream buf;
  write_network(buf, net);
  auto back = read_network(buf);
  EXPECT_EQ(back, net);
  Vector x = Vector::Random(5);
  EXPECT_EQ(back.forward(x), net.forward(x));
}

TEST(Checkpoint, CorruptInputThrows) {
  std::stringstream bad("ltlmarl-net 1\nsizes 2 1\nlayer 0\n0x1p+0\n");
  EXPECT_THROW(read_network(bad), ltlmarl::DataError);
  std::stringstream wrong("ltlmarl-net 9\n");
  EXPECT_THROW(read_network(wrong), ltlmarl::DataError);
}
