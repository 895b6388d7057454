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

#ifndef KNODE_TYPES_HPP_
#define KNODE_TYPES_HPP_

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace knode {

inline constexpr int kStateDim = 12;
inline constexpr int kInputDim = 4;
inline constexpr int kFeatureDim = kStateDim + kInputDim;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using InputVector = Eigen::Matrix<double, kInputDim, 1>;
using FeatureVector = Eigen::Matrix<double, kFeatureDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using InputMatrix = Eigen::Matrix<double, kStateDim, kInputDim>;

// Index layout of the 12-dimensional state vector.
namespace idx {
inline constexpr int kPos = 0;
inline constexpr int kVel = 3;
inline constexpr int kEul = 6;
inline constexpr int kOmega = 9;
}  // namespace idx

// Position, velocity (world frame), Z-X-Y Euler angles (roll, pitch, yaw) and
// body rates.
struct QuadState {
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 eul = Vec3::Zero();
  Vec3 omega = Vec3::Zero();

  StateVector ToVector() const {
    StateVector x;
    x << r, v, eul, omega;
    return x;
  }
  static QuadState FromVector(const StateVector& x) {
    return {x.segment<3>(idx::kPos), x.segment<3>(idx::kVel),
            x.segment<3>(idx::kEul), x.segment<3>(idx::kOmega)};
  }
};

// Collective thrust [N] and body moments [N m].
struct ControlInput {
  double u1 = 0.0;
  Vec3 u2 = Vec3::Zero();

  InputVector ToVector() const {
    InputVector u;
    u << u1, u2;
    return u;
  }
  static ControlInput FromVector(const InputVector& u) {
    return {u(0), u.tail<3>()};
  }
};

inline FeatureVector StackFeatures(const StateVector& x, const InputVector& u) {
  FeatureVector z;
  z << x, u;
  return z;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures of numerical routines (singular kinematics, divergence, failed
// factorizations). The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class GimbalLockError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Invalid configuration or missing inputs. The CLI maps these to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace knode

#endif  // KNODE_TYPES_HPP_
