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

#include "knode/models.hpp"

#include <stdexcept>
#include <utility>

namespace knode {

StateVector NominalModel::Derivative(const StateVector& x,
                                     const InputVector& u) const {
  return NominalDerivative(x, u, params_);
}

void NominalModel::Jacobian(const StateVector& x, const InputVector& u,
                            StateMatrix* a, InputMatrix* b) const {
  NominalJacobian(x, u, params_, a, b);
}

StateVector PlantModel::Derivative(const StateVector& x,
                                   const InputVector& u) const {
  return TrueDerivative(x, u, params_, drag_);
}

void PlantModel::Jacobian(const StateVector& x, const InputVector& u,
                          StateMatrix* a, InputMatrix* b) const {
  TrueJacobian(x, u, params_, drag_, a, b);
}

StateVector HybridDynamics::Derivative(const StateVector& x,
                                       const InputVector& u) const {
  return HybridDerivative(model_, x, u);
}

void HybridDynamics::Jacobian(const StateVector& x, const InputVector& u,
                              StateMatrix* a, InputMatrix* b) const {
  NominalJacobian(x, u, model_.params, a, b);
  const auto jac = model_.ResidualJacobian(x, u);
  *a += jac.leftCols<kStateDim>();
  *b += jac.rightCols<kInputDim>();
}

StateVector GpDynamics::Derivative(const StateVector& x,
                                   const InputVector& u) const {
  return NominalDerivative(x, u, params_) +
         StateVector(gp_.PredictMean(StackFeatures(x, u)));
}

void GpDynamics::Jacobian(const StateVector& x, const InputVector& u,
                          StateMatrix* a, InputMatrix* b) const {
  NominalJacobian(x, u, params_, a, b);
  const Eigen::MatrixXd jac = gp_.PredictMeanJacobian(StackFeatures(x, u));
  *a += jac.leftCols(kStateDim);
  *b += jac.rightCols(kInputDim);
}

void FiniteDifferenceJacobian(const DerivativeFn& f, const StateVector& x,
                              const InputVector& u, double step,
                              StateMatrix* a, InputMatrix* b) {
  for (int i = 0; i < kStateDim; ++i) {
    StateVector xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    a->col(i) = (f(xp, u) - f(xm, u)) / (2.0 * step);
  }
  for (int i = 0; i < kInputDim; ++i) {
    InputVector up = u, um = u;
    up(i) += step;
    um(i) -= step;
    b->col(i) = (f(x, up) - f(x, um)) / (2.0 * step);
  }
}

GpTrainingSet SampleGpData(const std::vector<Trajectory>& data,
                           const QuadParams& params, const DragParams& drag,
                           int count) {
  std::vector<std::pair<const StateVector*, const InputVector*>> samples;
  for (const Trajectory& traj : data) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
      samples.emplace_back(&traj.states[i], &traj.inputs[i]);
    }
  }
  if (count < 1 || samples.size() < static_cast<std::size_t>(count)) {
    throw std::invalid_argument("SampleGpData: not enough samples");
  }
  GpTrainingSet set;
  set.inputs.resize(count, kFeatureDim);
  set.targets.resize(count, kStateDim);
  for (int k = 0; k < count; ++k) {
    const std::size_t i = static_cast<std::size_t>(k) * samples.size() /
                          static_cast<std::size_t>(count);
    const StateVector& x = *samples[i].first;
    const InputVector& u = *samples[i].second;
    set.inputs.row(k) = StackFeatures(x, u).transpose();
    set.targets.row(k) = (TrueDerivative(x, u, params, drag) -
                          NominalDerivative(x, u, params))
                             .transpose();
  }
  return set;
}

}  // namespace knode
