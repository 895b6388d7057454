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
#include "knode/reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

namespace knode {
namespace {

constexpr double kPi = std::numbers::pi;

RefSpec Circle(double radius, double period) {
  RefSpec s;
  s.radius = radius;
  s.period = period;
  s.center = Eigen::Vector2d(0.5, -1.0);
  s.altitude = 1.5;
  return s;
}

TEST(EvaluateCurveTest, CircleStartsOnPositiveXWithTangentVelocity) {
  const RefSpec s = Circle(2.0, 4.0);
  const RefPoint p = EvaluateCurve(s, 0.0);
  EXPECT_NEAR((p.position - Vec3(2.5, -1.0, 1.5)).norm(), 0.0, 1e-15);
  const double w = 2.0 * kPi / 4.0;
  EXPECT_NEAR((p.velocity - Vec3(0.0, 2.0 * w, 0.0)).norm(), 0.0, 1e-15);
}

TEST(EvaluateCurveTest, CircleKeepsRadiusAndSpeed) {
  const RefSpec s = Circle(3.0, 5.0);
  for (double t = 0.0; t < 10.0; t += 0.37) {
    const RefPoint p = EvaluateCurve(s, t);
    EXPECT_NEAR((p.position.head<2>() - s.center).norm(), 3.0, 1e-12);
    EXPECT_NEAR(p.velocity.norm(), 2.0 * kPi * 3.0 / 5.0, 1e-12);
    EXPECT_EQ(p.position.z(), 1.5);
  }
}

TEST(EvaluateCurveTest, ClockwiseMirrorsDirection) {
  RefSpec s = Circle(1.0, 2.0);
  const RefPoint ccw = EvaluateCurve(s, 0.3);
  s.clockwise = true;
  const RefPoint cw = EvaluateCurve(s, 0.3);
  EXPECT_NEAR(cw.position.x(), ccw.position.x(), 1e-15);
  EXPECT_NEAR(cw.position.y() - s.center.y(), -(ccw.position.y() - s.center.y()),
              1e-15);
  // Angular momentum about the center changes sign.
  const Eigen::Vector2d rel = cw.position.head<2>() - s.center;
  EXPECT_LT(rel.x() * cw.velocity.y() - rel.y() * cw.velocity.x(), 0.0);
}

TEST(EvaluateCurveTest, LemniscateCrossesCenterAtQuarterPeriod) {
  RefSpec s = Circle(2.0, 8.0);
  s.kind = CurveKind::kLemniscate;
  EXPECT_NEAR((EvaluateCurve(s, 0.0).position - Vec3(2.5, -1.0, 1.5)).norm(),
              0.0, 1e-15);
  EXPECT_NEAR((EvaluateCurve(s, 2.0).position - Vec3(0.5, -1.0, 1.5)).norm(),
              0.0, 1e-12);
  EXPECT_NEAR((EvaluateCurve(s, 6.0).position - Vec3(0.5, -1.0, 1.5)).norm(),
              0.0, 1e-12);
}

TEST(EvaluateCurveTest, VelocityIsTimeDerivativeOfPosition) {
  for (CurveKind kind : {CurveKind::kCircle, CurveKind::kLemniscate}) {
    RefSpec s = Circle(2.5, 6.0);
    s.kind = kind;
    const double h = 1e-4;
    for (double t = 0.0; t < 6.0; t += 0.25) {
      const Vec3 fd = (EvaluateCurve(s, t + h).position -
                       EvaluateCurve(s, t - h).position) /
                      (2 * h);
      EXPECT_LT((fd - EvaluateCurve(s, t).velocity).norm(), 1e-7);
    }
  }
}

TEST(EvaluateReferenceTest, RampStartsAtRestAndJoinsCurve) {
  RefSpec s = Circle(2.0, 6.0);
  s.ramp_time = 2.0;
  const RefPoint start = EvaluateReference(s, 0.0);
  EXPECT_NEAR((start.position - EvaluateCurve(s, 0.0).position).norm(), 0.0,
              1e-15);
  EXPECT_NEAR(start.velocity.norm(), 0.0, 1e-15);
  for (double t : {2.0, 2.5, 5.0}) {
    const RefPoint a = EvaluateReference(s, t), b = EvaluateCurve(s, t);
    EXPECT_NEAR((a.position - b.position).norm(), 0.0, 1e-15);
    EXPECT_NEAR((a.velocity - b.velocity).norm(), 0.0, 1e-15);
  }
  // Continuity of position and velocity across the end of the ramp.
  const double eps = 1e-7;
  EXPECT_LT((EvaluateReference(s, 2.0 - eps).position -
             EvaluateCurve(s, 2.0).position).norm(), 1e-6);
  EXPECT_LT((EvaluateReference(s, 2.0 - eps).velocity -
             EvaluateCurve(s, 2.0).velocity).norm(), 1e-5);
}

TEST(EvaluateReferenceTest, RampVelocityIsDerivativeOfPosition) {
  RefSpec s = Circle(2.0, 6.0);
  s.ramp_time = 2.0;
  const double h = 1e-5;
  for (double t = 0.1; t < 2.0; t += 0.13) {
    const Vec3 fd = (EvaluateReference(s, t + h).position -
                     EvaluateReference(s, t - h).position) /
                    (2 * h);
    EXPECT_LT((fd - EvaluateReference(s, t).velocity).norm(), 1e-7);
  }
}

TEST(GenerateReferenceTest, GridAndContents) {
  const RefSpec s = Circle(2.0, 4.0);
  const Reference ref = GenerateReference(s, 8.0, 0.002);
  ASSERT_EQ(ref.states.size(), 4001u);
  EXPECT_DOUBLE_EQ(ref.duration(), 8.0);
  for (std::size_t i : {0u, 1234u, 4000u}) {
    const RefPoint p = EvaluateReference(s, 0.002 * static_cast<double>(i));
    EXPECT_EQ(ref.states[i].segment<3>(idx::kPos), p.position);
    EXPECT_EQ(ref.states[i].segment<3>(idx::kVel), p.velocity);
    EXPECT_TRUE(ref.states[i].segment<6>(idx::kEul).isZero(0.0));
  }
}

TEST(GenerateReferenceTest, FiniteDifferenceVelocityMatchesGrid) {
  const double dt = 0.002;
  const Reference ref = GenerateReference(Circle(2.0, 4.0), 8.0, dt);
  for (std::size_t i = 1; i + 1 < ref.states.size(); i += 97) {
    const Vec3 fd = (ref.states[i + 1].segment<3>(idx::kPos) -
                     ref.states[i - 1].segment<3>(idx::kPos)) /
                    (2 * dt);
    EXPECT_LT((fd - ref.states[i].segment<3>(idx::kVel)).norm(), 10 * dt * dt);
  }
}

TEST(GenerateReferenceTest, OffGridDurationThrows) {
  EXPECT_ANY_THROW(GenerateReference(Circle(1.0, 2.0), 1.0005, 0.002));
}

TEST(ReferenceTest, AtInterpolatesAndWindowSteps) {
  Reference ref;
  ref.dt = 0.5;
  ref.states = {StateVector::Zero(), StateVector::Constant(2.0),
                StateVector::Constant(4.0)};
  EXPECT_EQ(ref.At(0.5), StateVector::Constant(2.0));
  EXPECT_TRUE(ref.At(0.25).isApprox(StateVector::Constant(1.0)));
  const auto w = ref.Window(0.0, 3, 0.5);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[2], StateVector::Constant(4.0));
  EXPECT_THROW(ref.At(1.6), std::out_of_range);
  EXPECT_THROW(ref.Window(0.5, 3, 0.5), std::out_of_range);
}

TEST(ReferenceTest, ConstantHoldsState) {
  const StateVector x = StateVector::Constant(0.7);
  const Reference ref = Reference::Constant(x, 1.0, 0.01);
  ASSERT_EQ(ref.states.size(), 101u);
  EXPECT_EQ(ref.At(0.555), x);
}

TEST(RefSpecTest, NamesAndValidation) {
  RefSpec s = Circle(3.0, 2.0);
  EXPECT_EQ(s.Name(), "circle_r3");
  s.clockwise = true;
  EXPECT_EQ(s.Name(), "circle_r3_cw");
  s.kind = CurveKind::kLemniscate;
  s.clockwise = false;
  s.radius = 2.5;
  EXPECT_EQ(s.Name(), "lemniscate_r2.5");
  s.radius = 0.0;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s.radius = 1.0;
  s.period = -1.0;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s.period = 1.0;
  s.ramp_time = -0.1;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace knode
