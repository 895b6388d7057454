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
#include "knode/dtw.hpp"

#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace knode {
namespace {

using ::knode::testing::BruteForceDtw;
using Seq = std::vector<Eigen::VectorXd>;

Seq Scalars(std::initializer_list<double> values) {
  Seq s;
  for (double v : values) s.push_back(Eigen::VectorXd::Constant(1, v));
  return s;
}

Seq RandomSeq(std::mt19937_64& rng, std::size_t len, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Seq s(len, Eigen::VectorXd(dim));
  for (auto& p : s) {
    for (int k = 0; k < dim; ++k) p(k) = n(rng);
  }
  return s;
}

TEST(DtwTest, IdenticalSequencesHaveZeroDistance) {
  const Seq a = Scalars({0.0, 1.0, 2.0, 1.5});
  const DtwResult r = DtwDistance(a, a);
  EXPECT_EQ(r.distance, 0.0);
  ASSERT_EQ(r.path.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(r.path[i], std::make_pair(i, i));
  }
}

TEST(DtwTest, SinglePoints) {
  EXPECT_EQ(DtwDistance(Scalars({0.0}), Scalars({3.0})).distance, 3.0);
}

TEST(DtwTest, WarpsOverRepeatedSample) {
  const DtwResult r = DtwDistance(Scalars({0.0, 1.0, 2.0}), Scalars({0.0, 2.0}));
  EXPECT_EQ(r.distance, 1.0);
  EXPECT_DOUBLE_EQ(r.Normalized(), 1.0 / static_cast<double>(r.path.size()));
}

TEST(DtwTest, Vec3OverloadUsesEuclideanCost) {
  const std::vector<Vec3> a = {Vec3(0, 0, 0)}, b = {Vec3(3, 4, 0)};
  EXPECT_EQ(DtwDistance(a, b).distance, 5.0);
}

TEST(DtwTest, MatchesBruteForceOnRandomSequences) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::uniform_int_distribution<int> dim(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = dim(rng);
    const Seq a = RandomSeq(rng, len(rng), d), b = RandomSeq(rng, len(rng), d);
    EXPECT_EQ(DtwDistance(a, b).distance, BruteForceDtw(a, b)) << trial;
  }
}

TEST(DtwTest, PathIsMonotoneContiguousAndSumsToDistance) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Seq a = RandomSeq(rng, 3 + trial % 17, 2);
    const Seq b = RandomSeq(rng, 5 + trial % 11, 2);
    const DtwResult r = DtwDistance(a, b);
    ASSERT_EQ(r.path.front(), (std::pair<std::size_t, std::size_t>(0, 0)));
    ASSERT_EQ(r.path.back(), std::make_pair(a.size() - 1, b.size() - 1));
    double sum = 0.0;
    for (std::size_t k = 0; k < r.path.size(); ++k) {
      const auto [i, j] = r.path[k];
      sum += (a[i] - b[j]).norm();
      if (k == 0) continue;
      const auto [pi, pj] = r.path[k - 1];
      EXPECT_TRUE(i - pi <= 1 && j - pj <= 1 && (i - pi) + (j - pj) >= 1);
    }
    EXPECT_EQ(sum, r.distance);
    EXPECT_GE(r.path.size(), std::max(a.size(), b.size()));
    EXPECT_LE(r.path.size(), a.size() + b.size() - 1);
  }
}

TEST(DtwTest, SymmetricAndTranslationInvariant) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Seq a = RandomSeq(rng, 20, 3), b = RandomSeq(rng, 25, 3);
    const double ab = DtwDistance(a, b).distance;
    EXPECT_NEAR(DtwDistance(b, a).distance, ab, 1e-12 * ab);
    Eigen::VectorXd shift(3);
    shift << 10.0, -4.0, 2.5;
    Seq as = a, bs = b;
    for (auto& p : as) p += shift;
    for (auto& p : bs) p += shift;
    EXPECT_NEAR(DtwDistance(as, bs).distance, ab, 1e-9 * ab);
  }
}

TEST(DtwTest, BoundedByLockstepDistanceForEqualLengths) {
  std::mt19937_64 rng(5);
  const Seq a = RandomSeq(rng, 40, 3), b = RandomSeq(rng, 40, 3);
  double lockstep = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) lockstep += (a[i] - b[i]).norm();
  EXPECT_LE(DtwDistance(a, b).distance, lockstep);
}

TEST(DtwTest, RejectsEmptyAndMismatchedInput) {
  EXPECT_THROW(DtwDistance(Seq{}, Scalars({1.0})), std::invalid_argument);
  EXPECT_THROW(DtwDistance(Scalars({1.0}), Seq{}), std::invalid_argument);
  Seq two(1, Eigen::VectorXd::Zero(2));
  EXPECT_THROW(DtwDistance(Scalars({1.0}), two), std::invalid_argument);
}

}  // namespace
}  // namespace knode
