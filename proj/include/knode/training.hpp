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

#ifndef KNODE_TRAINING_HPP_
#define KNODE_TRAINING_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "knode/hybrid.hpp"
#include "knode/trajectory.hpp"

namespace knode {

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch = 0;   // segments per step; 0 = full batch
  int stride = 4;  // use every stride-th one-step segment
  std::uint64_t seed = 0;
  StateVector loss_weights = StateVector::Ones();

  void Validate() const;
};

struct TrainReport {
  std::vector<double> train_loss;     // loss before each epoch's updates
  std::vector<double> best_val_loss;  // best-so-far after each epoch
  double initial_val_loss = 0.0;
  double final_val_loss = 0.0;        // of the returned parameters
  int best_epoch = 0;                 // 0 = initial parameters
  double wall_seconds = 0.0;
};

// One-step segments (x_i, u_i) -> x_{i+1} gathered column-wise.
struct SegmentSet {
  Eigen::Matrix<double, kStateDim, Eigen::Dynamic> start;
  Eigen::Matrix<double, kInputDim, Eigen::Dynamic> input;
  Eigen::Matrix<double, kStateDim, Eigen::Dynamic> target;
  double dt = 0.0;

  Eigen::Index size() const { return start.cols(); }
  SegmentSet Subset(const std::vector<Eigen::Index>& cols) const;
};

// Throws std::invalid_argument when trajectories are too short, unevenly
// sampled, or sampled at different rates.
SegmentSet MakeSegments(const std::vector<Trajectory>& data, int stride = 1);

StateVector OneStepPredict(const HybridModel& h, const StateVector& x,
                           const InputVector& u, double dt);

// Mean over segments and state entries of the weighted squared one-step
// error, Euler-angle errors wrapped to (-pi, pi].
double KnodeLoss(const HybridModel& h, const SegmentSet& segs,
                 const StateVector& weights = StateVector::Ones());
double KnodeLoss(const HybridModel& h, const std::vector<Trajectory>& data,
                 const StateVector& weights = StateVector::Ones());

struct LossAndGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;  // w.r.t. h.net.params()
};

// Exact gradient of KnodeLoss by reverse-mode differentiation through the
// four RK4 stages (discrete adjoint of the one-step integrator).
LossAndGradient KnodeLossGradients(
    const HybridModel& h, const SegmentSet& segs,
    const StateVector& weights = StateVector::Ones());
LossAndGradient KnodeLossGradients(
    const HybridModel& h, const std::vector<Trajectory>& data,
    const StateVector& weights = StateVector::Ones());

struct TrainResult {
  HybridModel model;
  TrainReport report;
};

// Adam on the one-step loss. Returns the parameters with the lowest
// validation loss seen (the initial parameters count). Input normalization
// and output scales of `h` are used as given; see PrepareHybridModel.
TrainResult TrainKnode(const HybridModel& h,
                       const std::vector<Trajectory>& data,
                       const std::vector<Trajectory>& validation,
                       const TrainConfig& cfg);

// Fresh model with input statistics and residual output scales taken from
// the training data.
HybridModel PrepareHybridModel(
    const QuadParams& params, const std::vector<Trajectory>& data,
    const std::vector<int>& hidden, std::uint64_t seed,
    const ResidualMask& mask,
    const FeatureVector& scale_floor = DefaultFeatureScaleFloor());

}  // namespace knode

#endif  // KNODE_TRAINING_HPP_
