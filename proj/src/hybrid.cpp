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

#include "knode/hybrid.hpp"

#include <cmath>

#include "knode/integrators.hpp"

namespace knode {

HybridModel HybridModel::Create(const QuadParams& params,
                                const std::vector<int>& hidden,
                                std::uint64_t seed,
                                const ResidualMask& mask) {
  std::vector<int> sizes{kFeatureDim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(kStateDim);
  HybridModel h;
  h.params = params;
  h.net = Mlp::Initialized(sizes, seed);
  h.mask = mask;
  return h;
}

FeatureVector HybridModel::Normalize(const StateVector& x,
                                     const InputVector& u) const {
  return (StackFeatures(x, u) - input_mean).cwiseQuotient(input_scale);
}

StateVector HybridModel::Residual(const StateVector& x,
                                  const InputVector& u) const {
  const Eigen::VectorXd out = net.Forward(Normalize(x, u));
  return OutputGain().cwiseProduct(StateVector(out));
}

Eigen::Matrix<double, kStateDim, kFeatureDim> HybridModel::ResidualJacobian(
    const StateVector& x, const InputVector& u) const {
  const Eigen::MatrixXd jac = net.InputJacobian(Normalize(x, u));
  return OutputGain().asDiagonal() * jac *
         input_scale.cwiseInverse().asDiagonal();
}

void HybridModel::Validate() const {
  params.Validate();
  if (net.input_dim() != kFeatureDim || net.output_dim() != kStateDim) {
    throw DimensionError("hybrid network must map 16 features to 12 outputs");
  }
  if (!net.params().allFinite()) {
    throw NumericalError("hybrid network has non-finite parameters");
  }
  if ((input_scale.array() <= 0.0).any()) {
    throw DimensionError("hybrid input scale must be positive");
  }
}

StateVector HybridDerivative(const HybridModel& h, const StateVector& x,
                             const InputVector& u) {
  StateVector dx = NominalDerivative(x, u, h.params);
  const StateVector res = h.Residual(x, u);
  for (int i = 0; i < kStateDim; ++i) {
    if (h.mask(i) != 0.0) dx(i) += res(i);
  }
  return dx;
}

FeatureVector DefaultFeatureScaleFloor() {
  FeatureVector f;
  f << 1, 1, 1, 1, 1, 1, 0.3, 0.3, 0.3, 1, 1, 1, 1, 0.1, 0.1, 0.1;
  return f;
}

FeatureStats ComputeFeatureStats(const std::vector<Trajectory>& data,
                                 const FeatureVector& floor) {
  FeatureVector sum = FeatureVector::Zero();
  double n = 0.0;
  for (const auto& traj : data) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
      sum += StackFeatures(traj.states[i], traj.inputs[i]);
      n += 1.0;
    }
  }
  if (n == 0.0) throw std::invalid_argument("feature stats: no samples");
  FeatureStats stats;
  stats.mean = sum / n;
  FeatureVector sq = FeatureVector::Zero();
  for (const auto& traj : data) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
      sq += (StackFeatures(traj.states[i], traj.inputs[i]) - stats.mean)
                .cwiseAbs2();
    }
  }
  stats.scale = (sq / n).cwiseSqrt().cwiseMax(floor);
  for (int i = 0; i < kFeatureDim; ++i) {
    if (stats.scale(i) < 1e-9) stats.scale(i) = 1.0;
  }
  return stats;
}

StateVector EstimateResidualScale(const std::vector<Trajectory>& data,
                                  const QuadParams& params,
                                  double relative_floor) {
  StateVector sq = StateVector::Zero();
  double n = 0.0;
  for (const auto& traj : data) {
    const double dt = traj.UniformStep();
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
      const StateVector pred = Rk4Step(
          [&](const StateVector& s) {
            return NominalDerivative(s, traj.inputs[i], params);
          },
          traj.states[i], dt);
      sq += (StateDifference(traj.states[i + 1], pred) / dt).cwiseAbs2();
      n += 1.0;
    }
  }
  if (n == 0.0) throw std::invalid_argument("residual scale: no segments");
  StateVector rms = (sq / n).cwiseSqrt();
  const double floor = std::max(relative_floor * rms.maxCoeff(), 1e-300);
  return rms.cwiseMax(floor);
}

}  // namespace knode
