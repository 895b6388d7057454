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

#include "knode/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

namespace knode {
namespace {

Mat3 Skew(const Vec3& w) {
  Mat3 s;
  s << 0, -w.z(), w.y(),
       w.z(), 0, -w.x(),
       -w.y(), w.x(), 0;
  return s;
}

Mat3 Rx(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}

Mat3 Ry(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}

Mat3 Rz(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}

Mat3 dRx(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 0, 0, 0, 0, -s, -c, 0, c, -s;
  return m;
}

Mat3 dRy(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << -s, 0, c, 0, 0, 0, -c, 0, -s;
  return m;
}

Mat3 dRz(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << -s, -c, 0, c, -s, 0, 0, 0, 0;
  return m;
}

void RequirePositive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void QuadParams::Validate() const {
  RequirePositive(mass, "mass");
  RequirePositive(inertia.x(), "inertia[0]");
  RequirePositive(inertia.y(), "inertia[1]");
  RequirePositive(inertia.z(), "inertia[2]");
  RequirePositive(arm_length, "arm_length");
  RequirePositive(gamma, "gamma");
  RequirePositive(gravity, "gravity");
}

void DragParams::Validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(linear(i) >= 0.0) || !(quadratic(i) >= 0.0) ||
        !std::isfinite(linear(i)) || !std::isfinite(quadratic(i))) {
      throw ConfigError("drag coefficients must be finite and nonnegative");
    }
  }
}

void CheckGimbal(const Vec3& eul) {
  // det W = cos(roll) for the Z-X-Y rate matrix; pitch is held to the same
  // margin so states stay well inside the regime the controllers visit.
  constexpr double kLimit = std::numbers::pi / 2 - kGimbalMargin;
  if (!(std::abs(eul.x()) < kLimit) || !(std::abs(eul.y()) < kLimit)) {
    throw GimbalLockError("Euler angles within gimbal margin: roll=" +
                          std::to_string(eul.x()) +
                          " pitch=" + std::to_string(eul.y()));
  }
}

Mat3 EulerToRotation(const Vec3& eul) {
  CheckGimbal(eul);
  return Rz(eul.z()) * Rx(eul.x()) * Ry(eul.y());
}

std::array<Mat3, 3> RotationPartials(const Vec3& eul) {
  const Mat3 rx = Rx(eul.x()), ry = Ry(eul.y()), rz = Rz(eul.z());
  return {rz * dRx(eul.x()) * ry, rz * rx * dRy(eul.y()),
          dRz(eul.z()) * rx * ry};
}

Mat3 EulerRateMatrix(const Vec3& eul) {
  const double cphi = std::cos(eul.x()), sphi = std::sin(eul.x());
  const double cth = std::cos(eul.y()), sth = std::sin(eul.y());
  Mat3 w;
  w << cth, 0, -cphi * sth,
       0, 1, sphi,
       sth, 0, cphi * cth;
  return w;
}

Vec3 EulerRatesFromBodyRates(const Vec3& eul, const Vec3& omega) {
  CheckGimbal(eul);
  const double cphi = std::cos(eul.x()), sphi = std::sin(eul.x());
  const double cth = std::cos(eul.y()), sth = std::sin(eul.y());
  const double p = omega.x(), q = omega.y(), r = omega.z();
  const double yaw_rate = (-sth * p + cth * r) / cphi;
  return {cth * p + sth * r, q - sphi * yaw_rate, yaw_rate};
}

Eigen::Matrix<double, 3, 4> MixingMatrix(const QuadParams& p) {
  const double l = p.arm_length, g = p.gamma;
  Eigen::Matrix<double, 3, 4> m;
  m << 0, l, 0, -l,
       -l, 0, l, 0,
       g, -g, g, -g;
  return m;
}

ControlInput MotorForcesToInput(const Eigen::Vector4d& forces,
                                const QuadParams& p) {
  for (int i = 0; i < 4; ++i) {
    if (!(forces(i) >= 0.0)) {
      throw std::invalid_argument("motor force " + std::to_string(i) +
                                  " is negative");
    }
  }
  return {forces.sum(), MixingMatrix(p) * forces};
}

StateVector NominalDerivative(const StateVector& x, const InputVector& u,
                              const QuadParams& p) {
  const Vec3 eul = x.segment<3>(idx::kEul);
  const Vec3 omega = x.segment<3>(idx::kOmega);
  const Mat3 rot = EulerToRotation(eul);

  StateVector dx;
  dx.segment<3>(idx::kPos) = x.segment<3>(idx::kVel);
  dx.segment<3>(idx::kVel) = rot.col(2) * (u(0) / p.mass);
  dx(idx::kVel + 2) -= p.gravity;
  dx.segment<3>(idx::kEul) = EulerRatesFromBodyRates(eul, omega);
  const Vec3 j_omega = p.inertia.cwiseProduct(omega);
  dx.segment<3>(idx::kOmega) =
      (u.tail<3>() - omega.cross(j_omega)).cwiseQuotient(p.inertia);
  return dx;
}

void NominalJacobian(const StateVector& x, const InputVector& u,
                     const QuadParams& p, StateMatrix* a, InputMatrix* b) {
  const Vec3 eul = x.segment<3>(idx::kEul);
  const Vec3 omega = x.segment<3>(idx::kOmega);
  CheckGimbal(eul);
  a->setZero();
  b->setZero();

  a->block<3, 3>(idx::kPos, idx::kVel).setIdentity();

  // Thrust direction is the third column of R.
  const auto partials = RotationPartials(eul);
  for (int k = 0; k < 3; ++k) {
    a->block<3, 1>(idx::kVel, idx::kEul + k) =
        partials[k].col(2) * (u(0) / p.mass);
  }
  b->block<3, 1>(idx::kVel, 0) = EulerToRotation(eul).col(2) / p.mass;

  const double cphi = std::cos(eul.x()), sphi = std::sin(eul.x());
  const double cth = std::cos(eul.y()), sth = std::sin(eul.y());
  const double pr = omega.x(), rr = omega.z();
  const double n = -sth * pr + cth * rr;
  const double yaw_rate = n / cphi;
  const double dyaw_droll = n * sphi / (cphi * cphi);
  const double dyaw_dpitch = (-cth * pr - sth * rr) / cphi;
  const double dyaw_dp = -sth / cphi;
  const double dyaw_dr = cth / cphi;

  constexpr int e = idx::kEul, w = idx::kOmega;
  // roll rate
  (*a)(e, e + 1) = n;
  (*a)(e, w) = cth;
  (*a)(e, w + 2) = sth;
  // pitch rate = q - sin(roll) * yaw_rate
  (*a)(e + 1, e) = -cphi * yaw_rate - sphi * dyaw_droll;
  (*a)(e + 1, e + 1) = -sphi * dyaw_dpitch;
  (*a)(e + 1, w) = -sphi * dyaw_dp;
  (*a)(e + 1, w + 1) = 1.0;
  (*a)(e + 1, w + 2) = -sphi * dyaw_dr;
  // yaw rate
  (*a)(e + 2, e) = dyaw_droll;
  (*a)(e + 2, e + 1) = dyaw_dpitch;
  (*a)(e + 2, w) = dyaw_dp;
  (*a)(e + 2, w + 2) = dyaw_dr;

  const Mat3 j = p.inertia.asDiagonal();
  const Vec3 inv_j = p.inertia.cwiseInverse();
  a->block<3, 3>(w, w) =
      inv_j.asDiagonal() * (Skew(j * omega) - Skew(omega) * j);
  b->block<3, 3>(w, 1) = inv_j.asDiagonal();
}

Vec3 DragAcceleration(const StateVector& x, const DragParams& d) {
  const Mat3 rot = EulerToRotation(x.segment<3>(idx::kEul));
  const Vec3 vb = rot.transpose() * x.segment<3>(idx::kVel);
  const Vec3 body = d.linear.cwiseProduct(vb) +
                    d.quadratic.cwiseProduct(vb.cwiseProduct(vb.cwiseAbs()));
  return -(rot * body);
}

Eigen::Matrix<double, 3, 6> DragJacobian(const StateVector& x,
                                         const DragParams& d) {
  const Vec3 eul = x.segment<3>(idx::kEul);
  const Vec3 v = x.segment<3>(idx::kVel);
  const Mat3 rot = EulerToRotation(eul);
  const Vec3 vb = rot.transpose() * v;
  const Vec3 body = d.linear.cwiseProduct(vb) +
                    d.quadratic.cwiseProduct(vb.cwiseProduct(vb.cwiseAbs()));
  const Vec3 slope = d.linear + 2.0 * d.quadratic.cwiseProduct(vb.cwiseAbs());

  Eigen::Matrix<double, 3, 6> jac;
  jac.leftCols<3>() = -rot * slope.asDiagonal() * rot.transpose();
  const auto partials = RotationPartials(eul);
  for (int k = 0; k < 3; ++k) {
    const Vec3 dvb = partials[k].transpose() * v;
    jac.col(3 + k) = -(partials[k] * body + rot * slope.cwiseProduct(dvb));
  }
  return jac;
}

StateVector TrueDerivative(const StateVector& x, const InputVector& u,
                           const QuadParams& p, const DragParams& d) {
  StateVector dx = NominalDerivative(x, u, p);
  dx.segment<3>(idx::kVel) += DragAcceleration(x, d);
  return dx;
}

double WrapAngle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::remainder(a, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

StateVector StateDifference(const StateVector& a, const StateVector& b) {
  StateVector d = a - b;
  for (int k = 0; k < 3; ++k) d(idx::kEul + k) = WrapAngle(d(idx::kEul + k));
  return d;
}

void TrueJacobian(const StateVector& x, const InputVector& u,
                  const QuadParams& p, const DragParams& d, StateMatrix* a,
                  InputMatrix* b) {
  NominalJacobian(x, u, p, a, b);
  a->block<3, 6>(idx::kVel, idx::kVel) += DragJacobian(x, d);
}

}  // namespace knode
