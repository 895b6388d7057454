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

#ifndef KNODE_MODELS_HPP_
#define KNODE_MODELS_HPP_

#include <memory>
#include <vector>

#include "knode/dynamics.hpp"
#include "knode/gp.hpp"
#include "knode/hybrid.hpp"
#include "knode/integrators.hpp"
#include "knode/trajectory.hpp"

namespace knode {

// Continuous-time dynamics with Jacobians, as consumed by the controller.
class ContinuousModel {
 public:
  virtual ~ContinuousModel() = default;
  virtual StateVector Derivative(const StateVector& x,
                                 const InputVector& u) const = 0;
  virtual void Jacobian(const StateVector& x, const InputVector& u,
                        StateMatrix* a, InputMatrix* b) const = 0;

  DerivativeFn AsFunction() const {
    return [this](const StateVector& x, const InputVector& u) {
      return Derivative(x, u);
    };
  }
};

// First-principles model only.
class NominalModel : public ContinuousModel {
 public:
  explicit NominalModel(QuadParams p) : params_(p) {}
  StateVector Derivative(const StateVector& x,
                         const InputVector& u) const override;
  void Jacobian(const StateVector& x, const InputVector& u, StateMatrix* a,
                InputMatrix* b) const override;

 private:
  QuadParams params_;
};

// Nominal model plus drag; the simulated plant.
class PlantModel : public ContinuousModel {
 public:
  PlantModel(QuadParams p, DragParams d) : params_(p), drag_(d) {}
  StateVector Derivative(const StateVector& x,
                         const InputVector& u) const override;
  void Jacobian(const StateVector& x, const InputVector& u, StateMatrix* a,
                InputMatrix* b) const override;

 private:
  QuadParams params_;
  DragParams drag_;
};

// Nominal plus neural residual. Network Jacobians are exact.
class HybridDynamics : public ContinuousModel {
 public:
  explicit HybridDynamics(HybridModel h) : model_(std::move(h)) {}
  StateVector Derivative(const StateVector& x,
                         const InputVector& u) const override;
  void Jacobian(const StateVector& x, const InputVector& u, StateMatrix* a,
                InputMatrix* b) const override;
  const HybridModel& model() const { return model_; }

 private:
  HybridModel model_;
};

// Nominal plus GP posterior mean of the residual.
class GpDynamics : public ContinuousModel {
 public:
  GpDynamics(QuadParams p, GpModel g) : params_(p), gp_(std::move(g)) {}
  StateVector Derivative(const StateVector& x,
                         const InputVector& u) const override;
  void Jacobian(const StateVector& x, const InputVector& u, StateMatrix* a,
                InputMatrix* b) const override;

 private:
  QuadParams params_;
  GpModel gp_;
};

// GP regression data: `count` samples at a uniform stride over the
// concatenated trajectories, labelled with the exact residual
// TrueDerivative - NominalDerivative for the given physical parameters.
struct GpTrainingSet {
  Eigen::MatrixXd inputs;   // count x 16, rows [x u]
  Eigen::MatrixXd targets;  // count x 12
};
GpTrainingSet SampleGpData(const std::vector<Trajectory>& data,
                           const QuadParams& params, const DragParams& drag,
                           int count = 80);

// Central finite-difference Jacobians of any derivative function.
void FiniteDifferenceJacobian(const DerivativeFn& f, const StateVector& x,
                              const InputVector& u, double step,
                              StateMatrix* a, InputMatrix* b);

}  // namespace knode

#endif  // KNODE_MODELS_HPP_
