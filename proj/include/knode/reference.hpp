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

#ifndef KNODE_REFERENCE_HPP_
#define KNODE_REFERENCE_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "knode/types.hpp"

namespace knode {

enum class CurveKind { kCircle, kLemniscate };

// Planar reference at constant altitude with zero yaw. For the lemniscate
// (Gerono form) `radius` is the half-width.
struct RefSpec {
  CurveKind kind = CurveKind::kCircle;
  double radius = 1.0;
  double period = 8.0;
  double altitude = 1.0;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double ramp_time = 2.0;  // minimum-jerk blend from hover; 0 disables
  bool clockwise = false;  // direction of travel seen from above

  void Validate() const;
  // e.g. "circle_r3", "circle_r3_cw" or "lemniscate_r2.5".
  std::string Name() const;
};

struct RefPoint {
  Vec3 position;
  Vec3 velocity;
};

// The steady periodic curve at time t (phase 0 at t = 0).
RefPoint EvaluateCurve(const RefSpec& spec, double t);

// The curve blended in from hover at the curve's t = 0 point:
// p(t) = p0 + s(t / ramp) (curve(t) - p0) with s the quintic minimum-jerk
// profile, so the reference starts at rest and joins the curve with matching
// position, velocity and acceleration.
RefPoint EvaluateReference(const RefSpec& spec, double t);

// Desired states sampled every dt (position, velocity; other entries zero).
struct Reference {
  double dt = 0.0;
  std::vector<StateVector> states;

  double duration() const {
    return states.empty() ? 0.0 : dt * static_cast<double>(states.size() - 1);
  }
  // Sample at t (linear interpolation between grid points).
  StateVector At(double t) const;
  // count samples at t, t + step, ...; throws std::out_of_range past the end.
  std::vector<StateVector> Window(double t, int count, double step) const;

  static Reference Constant(const StateVector& state, double duration,
                            double dt);
};

// duration must be a multiple of dt.
Reference GenerateReference(const RefSpec& spec, double duration, double dt);

}  // namespace knode

#endif  // KNODE_REFERENCE_HPP_
