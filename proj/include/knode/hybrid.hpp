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

#ifndef KNODE_HYBRID_HPP_
#define KNODE_HYBRID_HPP_

#include <cstdint>
#include <vector>

#include "knode/dynamics.hpp"
#include "knode/mlp.hpp"
#include "knode/trajectory.hpp"
#include "knode/types.hpp"

namespace knode {

// Selects which derivative entries receive the network output.
using ResidualMask = Eigen::Matrix<double, kStateDim, 1>;

inline ResidualMask FullMask() { return ResidualMask::Ones(); }
inline ResidualMask VelocityMask() {
  ResidualMask m = ResidualMask::Zero();
  m.segment<3>(idx::kVel).setOnes();
  return m;
}

// Nominal dynamics plus a neural residual:
//   f(x,u) + mask * output_scale * net((z - input_mean) / input_scale)
// with z = [x u]. Masked-out outputs are dropped before they reach the state
// derivative, so they receive no gradient either.
struct HybridModel {
  QuadParams params;
  Mlp net;
  ResidualMask mask = FullMask();
  FeatureVector input_mean = FeatureVector::Zero();
  FeatureVector input_scale = FeatureVector::Ones();
  StateVector output_scale = StateVector::Ones();

  // 16 -> hidden... -> 12 network with tanh hidden units.
  static HybridModel Create(const QuadParams& params,
                            const std::vector<int>& hidden,
                            std::uint64_t seed,
                            const ResidualMask& mask = FullMask());

  FeatureVector Normalize(const StateVector& x, const InputVector& u) const;
  StateVector OutputGain() const { return mask.cwiseProduct(output_scale); }
  StateVector Residual(const StateVector& x, const InputVector& u) const;
  // d Residual / d [x u].
  Eigen::Matrix<double, kStateDim, kFeatureDim> ResidualJacobian(
      const StateVector& x, const InputVector& u) const;

  void Validate() const;
};

StateVector HybridDerivative(const HybridModel& h, const StateVector& x,
                             const InputVector& u);

struct FeatureStats {
  FeatureVector mean;
  FeatureVector scale;
};

// Typical magnitudes of [r v eul omega u1 u2]: 1 m, 1 m/s, 0.3 rad, 1 rad/s,
// 1 N, 0.1 N m. Used as lower bounds on standardization scales so that
// features that barely move in the data (altitude, yaw, body rates, moments
// in steady flight) are not blown up into large network inputs.
FeatureVector DefaultFeatureScaleFloor();

// Per-feature mean and standard deviation over every sample, with each
// scale raised to at least `floor` (and to 1 where the data and the floor
// are both degenerate).
FeatureStats ComputeFeatureStats(
    const std::vector<Trajectory>& data,
    const FeatureVector& floor = FeatureVector::Zero());

// Per-entry RMS of (x_{i+1} - rk4_nominal(x_i, u_i)) / dt over all segments,
// floored at `relative_floor` times the largest entry. Used to put each
// network output on the scale of the residual it has to explain.
StateVector EstimateResidualScale(const std::vector<Trajectory>& data,
                                  const QuadParams& params,
                                  double relative_floor = 1e-6);

}  // namespace knode

#endif  // KNODE_HYBRID_HPP_
