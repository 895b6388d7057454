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
#include "knode/closed_loop.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

namespace knode {
namespace {

const QuadParams kQuad;

StateVector HoverAt(const Vec3& p) {
  StateVector x = StateVector::Zero();
  x.segment<3>(idx::kPos) = p;
  return x;
}

RefSpec ShortRamp(double radius) {
  RefSpec s;
  s.radius = radius;
  s.period = 2.0 * std::numbers::pi * radius / 2.0;
  s.ramp_time = 0.5;
  return s;
}

// Position RMSE against the reference from sample `first` on.
double PositionRmse(const Trajectory& flight, const Reference& ref,
                    std::size_t first = 0) {
  double sq = 0.0;
  for (std::size_t i = first; i < flight.size(); ++i) {
    sq += (flight.states[i] - ref.states[i]).segment<3>(idx::kPos).squaredNorm();
  }
  return std::sqrt(sq / static_cast<double>(flight.size() - first));
}

TEST(ClosedLoopTest, MatchedModelHoldsHover) {
  const NominalModel model(kQuad);
  const MpcConfig cfg = MpcConfig::Defaults(kQuad);
  const Reference ref = Reference::Constant(HoverAt(Vec3(1, 2, 1)), 2.0, 0.002);
  const ClosedLoopResult r = ClosedLoopSimulate(model, model, ref, 1.0, cfg);
  ASSERT_EQ(r.trajectory.size(), 501u);
  ASSERT_EQ(r.log.size(), 50u);
  for (const StateVector& x : r.trajectory.states) {
    EXPECT_LT((x - ref.states[0]).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(ClosedLoopTest, LogFollowsControlGrid) {
  const NominalModel model(kQuad);
  const MpcConfig cfg = MpcConfig::Defaults(kQuad);
  const Reference ref = Reference::Constant(HoverAt(Vec3(0, 0, 1)), 2.0, 0.002);
  const ClosedLoopResult r = ClosedLoopSimulate(
      model, model, ref, 0.4, cfg, {}, HoverAt(Vec3(0.2, -0.1, 0.9)));
  ASSERT_EQ(r.log.size(), 20u);
  for (std::size_t k = 0; k < r.log.size(); ++k) {
    EXPECT_NEAR(r.log[k].t, 0.02 * static_cast<double>(k), 1e-12);
    EXPECT_GE(r.log[k].solve_seconds, 0.0);
  }
  EXPECT_EQ(r.trajectory.states.front(), HoverAt(Vec3(0.2, -0.1, 0.9)));
  // Inputs are held for ten plant steps between solves.
  for (std::size_t i = 0; i < 200; ++i) {
    EXPECT_EQ(r.trajectory.inputs[i], r.trajectory.inputs[i - i % 10]);
  }
}

TEST(ClosedLoopTest, RecoversFromOffset) {
  const NominalModel model(kQuad);
  const MpcConfig cfg = MpcConfig::Defaults(kQuad);
  const Reference ref = Reference::Constant(HoverAt(Vec3(0, 0, 1)), 4.0, 0.002);
  const ClosedLoopResult r = ClosedLoopSimulate(
      model, model, ref, 3.0, cfg, {}, HoverAt(Vec3(0.3, -0.3, 0.8)));
  const StateVector end = r.trajectory.states.back();
  EXPECT_LT((end - ref.states[0]).segment<3>(idx::kPos).norm(), 1e-2);
  for (const InputVector& u : r.trajectory.inputs) {
    EXPECT_TRUE((u.array() >= cfg.u_min.array()).all());
    EXPECT_TRUE((u.array() <= cfg.u_max.array()).all());
  }
}

TEST(ClosedLoopTest, ModelMismatchLeavesTrackingError) {
  const NominalModel nominal(kQuad);
  const PlantModel plant(kQuad, DragParams{});
  const MpcConfig cfg = MpcConfig::Defaults(kQuad);
  const Reference ref = GenerateReference(ShortRamp(2.0), 2.5, 0.002);
  // Second half only, past the ramp transient.
  const double mismatched = PositionRmse(
      ClosedLoopSimulate(nominal, plant, ref, 2.0, cfg).trajectory, ref, 500);
  const double matched = PositionRmse(
      ClosedLoopSimulate(plant, plant, ref, 2.0, cfg).trajectory, ref, 500);
  EXPECT_GT(mismatched, 3.0 * matched);
  EXPECT_GT(mismatched, 0.1);
}

TEST(ClosedLoopTest, LongerHorizonTracksBetter) {
  const PlantModel plant(kQuad, DragParams{});
  MpcConfig cfg = MpcConfig::Defaults(kQuad);
  const Reference ref = GenerateReference(ShortRamp(2.0), 2.5, 0.002);
  cfg.horizon = 1;
  const double short_rmse = PositionRmse(
      ClosedLoopSimulate(plant, plant, ref, 2.0, cfg).trajectory, ref);
  cfg.horizon = 20;
  const double long_rmse = PositionRmse(
      ClosedLoopSimulate(plant, plant, ref, 2.0, cfg).trajectory, ref);
  EXPECT_LT(long_rmse, short_rmse);
}

TEST(ClosedLoopTest, RejectsBadTiming) {
  const NominalModel model(kQuad);
  MpcConfig cfg = MpcConfig::Defaults(kQuad);
  const Reference ref = Reference::Constant(HoverAt(Vec3(0, 0, 1)), 1.0, 0.002);
  EXPECT_THROW(ClosedLoopSimulate(model, model, ref, 1.0, cfg),
               std::invalid_argument);
  EXPECT_THROW(ClosedLoopSimulate(model, model, ref, 0.0, cfg),
               std::invalid_argument);
  cfg.dt = 0.003;
  EXPECT_THROW(ClosedLoopSimulate(model, model, ref, 0.3, cfg, {0.002, {}}),
               std::invalid_argument);
}

}  // namespace
}  // namespace knode
