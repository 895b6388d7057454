// Copyright 2026 The knode_mpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "knode/mlp.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <gtest/gtest.h>

#include "knode/types.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace knode {
namespace {

using ::knode::testing::MlpGradientError;
using ::knode::testing::RandomMlp;
using ::knode::testing::RandomVector;

TEST(MlpTest, ZeroParametersGiveZeroOutput) {
  const Mlp net({16, 64, 16, 12});
  std::mt19937_64 rng(1);
  EXPECT_EQ(net.Forward(RandomVector(16, rng)), Eigen::VectorXd::Zero(12));
}

TEST(MlpTest, OutputBiasOnlyGivesConstant) {
  Mlp net({4, 5, 3});
  const Eigen::Vector3d b(0.5, -1.0, 2.0);
  net.mutable_bias(1) = b;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(net.Forward(RandomVector(4, rng, 10.0)), Eigen::VectorXd(b));
  }
}

TEST(MlpTest, InitializedNetworkStartsAtZeroOutput) {
  const Mlp net = Mlp::Initialized({16, 64, 16, 12}, 0);
  std::mt19937_64 rng(3);
  EXPECT_EQ(net.Forward(RandomVector(16, rng)), Eigen::VectorXd::Zero(12));
  EXPECT_GT(net.weight(0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE(net.weight(0).cwiseAbs().maxCoeff(), 1.0 / std::sqrt(16.0));
  EXPECT_LE(net.weight(1).cwiseAbs().maxCoeff(), 1.0 / std::sqrt(64.0));
}

TEST(MlpTest, InitializationIsSeedDeterministic) {
  EXPECT_EQ(Mlp::Initialized({16, 8, 12}, 42).params(),
            Mlp::Initialized({16, 8, 12}, 42).params());
  EXPECT_NE(Mlp::Initialized({16, 8, 12}, 42).params(),
            Mlp::Initialized({16, 8, 12}, 43).params());
}

// Independent forward pass with plain arrays and explicit loops.
TEST(MlpTest, TwoThreeTwoMatchesHandRolledOracle) {
  const double w0[3][2] = {{0.3, -0.7}, {1.1, 0.2}, {-0.4, 0.9}};
  const double b0[3] = {0.05, -0.1, 0.2};
  const double w1[2][3] = {{0.6, -1.2, 0.8}, {-0.3, 0.5, 1.4}};
  const double b1[2] = {0.01, -0.02};
  Mlp net({2, 3, 2});
  for (int r = 0; r < 3; ++r) {
    net.mutable_bias(0)(r) = b0[r];
    for (int c = 0; c < 2; ++c) net.mutable_weight(0)(r, c) = w0[r][c];
  }
  for (int r = 0; r < 2; ++r) {
    net.mutable_bias(1)(r) = b1[r];
    for (int c = 0; c < 3; ++c) net.mutable_weight(1)(r, c) = w1[r][c];
  }
  const double z[2] = {0.8, -1.5};
  double hidden[3];
  for (int r = 0; r < 3; ++r) {
    double s = b0[r];
    for (int c = 0; c < 2; ++c) s += w0[r][c] * z[c];
    hidden[r] = std::tanh(s);
  }
  const Eigen::VectorXd out = net.Forward(Eigen::Vector2d(z[0], z[1]));
  for (int r = 0; r < 2; ++r) {
    double s = b1[r];
    for (int c = 0; c < 3; ++c) s += w1[r][c] * hidden[c];
    EXPECT_NEAR(out(r), s, 1e-14);
  }
}

TEST(MlpTest, BatchMatchesColumnwiseForward) {
  std::mt19937_64 rng(4);
  const Mlp net = RandomMlp({5, 7, 3}, rng);
  Eigen::MatrixXd z(5, 4);
  for (int c = 0; c < 4; ++c) z.col(c) = RandomVector(5, rng);
  const Eigen::MatrixXd out = net.ForwardBatch(z);
  for (int c = 0; c < 4; ++c) {
    EXPECT_LT((out.col(c) - net.Forward(z.col(c))).cwiseAbs().maxCoeff(),
              1e-15);
  }
}

TEST(MlpTest, DimensionMismatchRaises) {
  const Mlp net({3, 4, 2});
  EXPECT_THROW(net.Forward(Eigen::VectorXd::Zero(4)), DimensionError);
  Mlp copy = net;
  EXPECT_THROW(copy.set_params(Eigen::VectorXd::Zero(3)), DimensionError);
  EXPECT_THROW(Mlp({3}), DimensionError);
}

TEST(MlpGradientsTest, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(5);
  const Mlp net = RandomMlp({16, 8, 12}, rng);
  const MlpGradients g =
      ComputeMlpGradients(net, RandomVector(16, rng), Eigen::VectorXd::Zero(12));
  EXPECT_EQ(g.params, Eigen::VectorXd::Zero(net.num_params()));
  EXPECT_EQ(g.input, Eigen::VectorXd::Zero(16));
}

TEST(MlpGradientsTest, MatchFiniteDifferencesOnRandomNets) {
  std::mt19937_64 rng(6);
  const std::vector<std::vector<int>> shapes = {
      {16, 8, 12}, {16, 4, 12}, {16, 64, 16, 12}, {2, 3, 2}, {5, 6, 7, 3}};
  for (int trial = 0; trial < 10; ++trial) {
    const auto& shape = shapes[trial % shapes.size()];
    const Mlp net = RandomMlp(shape, rng);
    const double err =
        MlpGradientError(net, RandomVector(shape.front(), rng),
                         RandomVector(shape.back(), rng));
    EXPECT_LT(err, 1e-6) << "trial " << trial;
  }
}

TEST(MlpGradientsTest, LinearNetInputGradientIsTransposedWeights) {
  std::mt19937_64 rng(7);
  const Mlp net = RandomMlp({4, 3}, rng, Activation::kIdentity);
  const Eigen::VectorXd up = RandomVector(3, rng);
  const MlpGradients g = ComputeMlpGradients(net, RandomVector(4, rng), up);
  EXPECT_EQ(g.input, (net.weight(0).transpose() * up).eval());
}

TEST(MlpGradientsTest, InputJacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  const Mlp net = RandomMlp({16, 8, 12}, rng);
  const Eigen::VectorXd z = RandomVector(16, rng);
  const Eigen::MatrixXd jac = net.InputJacobian(z);
  ASSERT_EQ(jac.rows(), 12);
  ASSERT_EQ(jac.cols(), 16);
  const double h = 1e-6;
  for (int j = 0; j < 16; ++j) {
    Eigen::VectorXd zh = z, zl = z;
    zh(j) += h;
    zl(j) -= h;
    const Eigen::VectorXd fd = (net.Forward(zh) - net.Forward(zl)) / (2 * h);
    EXPECT_LT((fd - jac.col(j)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(MlpGradientsTest, BatchBackwardSumsPerSampleGradients) {
  std::mt19937_64 rng(9);
  const Mlp net = RandomMlp({6, 5, 4}, rng);
  Eigen::MatrixXd z(6, 3), up(4, 3);
  for (int c = 0; c < 3; ++c) {
    z.col(c) = RandomVector(6, rng);
    up.col(c) = RandomVector(4, rng);
  }
  Mlp::Cache cache;
  net.ForwardBatch(z, &cache);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.num_params());
  Eigen::MatrixXd input_grad;
  net.BackwardBatch(cache, up, &grad, &input_grad);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(net.num_params());
  for (int c = 0; c < 3; ++c) {
    const MlpGradients g = ComputeMlpGradients(net, z.col(c), up.col(c));
    expected += g.params;
    EXPECT_LT((input_grad.col(c) - g.input).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_LT((grad - expected).cwiseAbs().maxCoeff(), 1e-13);
}

}  // namespace
}  // namespace knode
