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

#ifndef KNODE_DYNAMICS_HPP_
#define KNODE_DYNAMICS_HPP_

#include <array>

#include <Eigen/Core>

#include "knode/types.hpp"

namespace knode {

// Distance from the Euler-rate singularity inside which kinematics are
// rejected.
inline constexpr double kGimbalMargin = 0.02;

struct QuadParams {
  double mass = 0.5;
  Vec3 inertia = Vec3(2.3e-3, 2.3e-3, 4.0e-3);  // diagonal of J
  double arm_length = 0.17;
  double gamma = 0.016;  // moment-to-thrust coefficient ratio
  double gravity = 9.81;

  void Validate() const;
  double HoverThrust() const { return mass * gravity; }
  InputVector HoverInput() const { return InputVector(HoverThrust(), 0, 0, 0); }
};

// Mass-normalized body-frame drag: linear coefficients in 1/s, quadratic in
// 1/m, so the result is an acceleration directly.
struct DragParams {
  Vec3 linear = Vec3(0.3, 0.3, 0.15);
  Vec3 quadratic = Vec3(0.1, 0.1, 0.05);

  void Validate() const;
  static DragParams Zero() { return {Vec3::Zero(), Vec3::Zero()}; }
};

// Throws GimbalLockError when the Euler-rate kinematics are within
// kGimbalMargin of singular.
void CheckGimbal(const Vec3& eul);

// Body-to-world rotation, Z-X-Y convention: R = Rz(yaw) Rx(roll) Ry(pitch).
Mat3 EulerToRotation(const Vec3& eul);

// Partial derivatives of EulerToRotation with respect to roll, pitch, yaw.
std::array<Mat3, 3> RotationPartials(const Vec3& eul);

// Maps Euler-angle rates to body rates: omega = W(eul) * eul_dot.
Mat3 EulerRateMatrix(const Vec3& eul);

// Inverse of EulerRateMatrix applied to body rates.
Vec3 EulerRatesFromBodyRates(const Vec3& eul, const Vec3& omega);

// 3x4 map from motor forces to body moments.
Eigen::Matrix<double, 3, 4> MixingMatrix(const QuadParams& p);

ControlInput MotorForcesToInput(const Eigen::Vector4d& forces,
                                const QuadParams& p);

StateVector NominalDerivative(const StateVector& x, const InputVector& u,
                              const QuadParams& p);

// Exact Jacobians of NominalDerivative.
void NominalJacobian(const StateVector& x, const InputVector& u,
                     const QuadParams& p, StateMatrix* a, InputMatrix* b);

Vec3 DragAcceleration(const StateVector& x, const DragParams& d);

// Derivative of DragAcceleration with respect to [v, eul] (3x6).
Eigen::Matrix<double, 3, 6> DragJacobian(const StateVector& x,
                                         const DragParams& d);

// Nominal dynamics plus drag on the velocity block; the synthetic plant.
StateVector TrueDerivative(const StateVector& x, const InputVector& u,
                           const QuadParams& p, const DragParams& d);

// Wraps an angle to (-pi, pi].
double WrapAngle(double a);

// a - b with the Euler-angle block wrapped to (-pi, pi].
StateVector StateDifference(const StateVector& a, const StateVector& b);

void TrueJacobian(const StateVector& x, const InputVector& u,
                  const QuadParams& p, const DragParams& d, StateMatrix* a,
                  InputMatrix* b);

}  // namespace knode

#endif  // KNODE_DYNAMICS_HPP_
