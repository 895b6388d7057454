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

#ifndef KNODE_MPC_HPP_
#define KNODE_MPC_HPP_

#include <optional>
#include <vector>

#include "knode/dynamics.hpp"
#include "knode/models.hpp"
#include "knode/reference.hpp"
#include "knode/types.hpp"

namespace knode {

// x_{k+1} = Step(x_k, u_k) with its Jacobians.
class DiscreteModel {
 public:
  virtual ~DiscreteModel() = default;
  virtual StateVector Step(const StateVector& x,
                           const InputVector& u) const = 0;
  virtual void Linearize(const StateVector& x, const InputVector& u,
                         StateMatrix* a, InputMatrix* b) const = 0;
};

// One explicit RK4 step of a continuous model with zero-order-hold input.
// Linearize differentiates through the four stages exactly, given exact stage
// Jacobians.
class Rk4Discretization : public DiscreteModel {
 public:
  Rk4Discretization(const ContinuousModel& model, double dt);
  StateVector Step(const StateVector& x, const InputVector& u) const override;
  void Linearize(const StateVector& x, const InputVector& u, StateMatrix* a,
                 InputMatrix* b) const override;
  double dt() const { return dt_; }

 private:
  const ContinuousModel& model_;
  double dt_;
};

// x_{k+1} = A x_k + B u_k + c.
class LinearDiscreteModel : public DiscreteModel {
 public:
  LinearDiscreteModel(StateMatrix a, InputMatrix b,
                      StateVector c = StateVector::Zero())
      : a_(a), b_(b), c_(c) {}
  StateVector Step(const StateVector& x, const InputVector& u) const override {
    return a_ * x + b_ * u + c_;
  }
  void Linearize(const StateVector&, const InputVector&, StateMatrix* a,
                 InputMatrix* b) const override {
    *a = a_;
    *b = b_;
  }

 private:
  StateMatrix a_;
  InputMatrix b_;
  StateVector c_;
};

struct MpcConfig {
  int horizon = 20;
  double dt = 0.02;
  StateVector q = StateVector::Zero();  // diagonal weights
  InputVector r = InputVector::Zero();
  StateVector p = StateVector::Zero();
  InputVector u_ref = InputVector::Zero();  // input the R term pulls toward
  InputVector u_min = InputVector::Constant(-1e9);
  InputVector u_max = InputVector::Constant(1e9);
  // Optional soft state box with quadratic penalty weight rho.
  bool use_state_bounds = false;
  StateVector x_min = StateVector::Constant(-1e9);
  StateVector x_max = StateVector::Constant(1e9);
  double rho = 1e3;
  int sqp_iters = 10;
  double kkt_tol = 1e-4;

  // Tracking defaults for a quadrotor with parameters `p`.
  static MpcConfig Defaults(const QuadParams& params);
  void Validate() const;
};

struct MpcSolution {
  std::vector<InputVector> u_seq;   // N inputs
  std::vector<StateVector> x_seq;   // N + 1 predicted states, x_seq[0] = x0
  double cost = 0.0;
  double kkt_residual = 0.0;        // inf-norm of the projected gradient
  int iterations = 0;
  bool converged = false;           // false: iteration limit or stalled
  std::vector<double> cost_history; // cost of every accepted iterate
};

// Total cost of an input sequence rolled out from x0. `ref` holds N + 1
// states.
double MpcCost(const DiscreteModel& model, const StateVector& x0,
               const std::vector<StateVector>& ref,
               const std::vector<InputVector>& u_seq, const MpcConfig& cfg,
               std::vector<StateVector>* x_seq = nullptr);

// Single-shooting Gauss-Newton SQP in tracking-error coordinates. Each
// iteration linearizes along the current rollout, solves the time-varying
// LQR subproblem by a Riccati recursion, and line-searches on the true cost
// with inputs clamped to the box. Returns the best iterate.
MpcSolution SolveMpc(
    const DiscreteModel& model, const StateVector& x0,
    const std::vector<StateVector>& ref, const MpcConfig& cfg,
    const std::optional<std::vector<InputVector>>& warm_start = std::nullopt);

// Horizon slice of `ref` starting at time t.
MpcSolution SolveMpc(
    const DiscreteModel& model, const StateVector& x0, const Reference& ref,
    double t, const MpcConfig& cfg,
    const std::optional<std::vector<InputVector>>& warm_start = std::nullopt);

// Drops the first input and repeats the last.
std::vector<InputVector> ShiftInputs(const std::vector<InputVector>& u_seq);

}  // namespace knode

#endif  // KNODE_MPC_HPP_
