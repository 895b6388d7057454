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

#include "knode/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "knode/integrators.hpp"

namespace knode {
namespace {

using StateBatch = Eigen::Matrix<double, kStateDim, Eigen::Dynamic>;
using InputBatch = Eigen::Matrix<double, kInputDim, Eigen::Dynamic>;

struct Stage {
  StateBatch state;
  Mlp::Cache cache;
};

// f_h evaluated column-wise; keeps what the backward pass needs.
StateBatch EvalStage(const HybridModel& h, const StateBatch& state,
                     const InputBatch& input, Stage* stage) {
  const Eigen::Index n = state.cols();
  Eigen::MatrixXd features(kFeatureDim, n);
  features.topRows(kStateDim) = state;
  features.bottomRows(kInputDim) = input;
  features = ((features.colwise() - h.input_mean).array().colwise() /
              h.input_scale.array())
                 .matrix();
  const Eigen::MatrixXd out = h.net.ForwardBatch(features, &stage->cache);
  StateBatch f(kStateDim, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    f.col(s) = NominalDerivative(state.col(s), input.col(s), h.params);
  }
  f += h.OutputGain().asDiagonal() * out;
  stage->state = state;
  return f;
}

// Adds the parameter gradient of sum_s upstream(:,s)^T f_h(stage) to `grad`
// and returns the state gradient when `want_state` is set.
StateBatch BackwardStage(const HybridModel& h, const Stage& stage,
                         const InputBatch& input, const StateBatch& upstream,
                         bool want_state, Eigen::VectorXd* grad) {
  const Eigen::MatrixXd nn_upstream = h.OutputGain().asDiagonal() * upstream;
  Eigen::MatrixXd feature_grad;
  h.net.BackwardBatch(stage.cache, nn_upstream, grad,
                      want_state ? &feature_grad : nullptr);
  if (!want_state) return {};
  StateBatch g = (feature_grad.topRows(kStateDim).array().colwise() /
                  h.input_scale.head<kStateDim>().array())
                     .matrix();
  StateMatrix a;
  InputMatrix b;
  for (Eigen::Index s = 0; s < stage.state.cols(); ++s) {
    NominalJacobian(stage.state.col(s), input.col(s), h.params, &a, &b);
    g.col(s).noalias() += a.transpose() * upstream.col(s);
  }
  return g;
}

StateBatch WrappedError(const StateBatch& pred, const StateBatch& target) {
  StateBatch e = pred - target;
  for (Eigen::Index s = 0; s < e.cols(); ++s) {
    for (int k = 0; k < 3; ++k) {
      e(idx::kEul + k, s) = WrapAngle(e(idx::kEul + k, s));
    }
  }
  return e;
}

double Evaluate(const HybridModel& h, const SegmentSet& segs,
                const StateVector& weights, Eigen::VectorXd* grad) {
  const Eigen::Index n = segs.size();
  if (n == 0) throw std::invalid_argument("knode loss: no segments");
  const double dt = segs.dt;
  const InputBatch& u = segs.input;
  Stage st1, st2, st3, st4;
  const StateBatch k1 = EvalStage(h, segs.start, u, &st1);
  const StateBatch k2 = EvalStage(h, segs.start + 0.5 * dt * k1, u, &st2);
  const StateBatch k3 = EvalStage(h, segs.start + 0.5 * dt * k2, u, &st3);
  const StateBatch k4 = EvalStage(h, segs.start + dt * k3, u, &st4);
  const StateBatch pred =
      segs.start + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  const StateBatch err = WrappedError(pred, segs.target);
  const double denom = static_cast<double>(kStateDim) * static_cast<double>(n);
  const double loss =
      (weights.asDiagonal() * err.cwiseAbs2()).sum() / denom;
  if (!std::isfinite(loss)) throw NumericalError("knode loss is not finite");
  if (!grad) return loss;

  grad->setZero(h.net.num_params());
  const StateBatch lambda = (2.0 / denom) * (weights.asDiagonal() * err);
  StateBatch g4 = (dt / 6.0) * lambda;
  StateBatch g3 = (dt / 3.0) * lambda;
  StateBatch g2 = (dt / 3.0) * lambda;
  StateBatch g1 = (dt / 6.0) * lambda;
  g3 += dt * BackwardStage(h, st4, u, g4, true, grad);
  g2 += (0.5 * dt) * BackwardStage(h, st3, u, g3, true, grad);
  g1 += (0.5 * dt) * BackwardStage(h, st2, u, g2, true, grad);
  BackwardStage(h, st1, u, g1, false, grad);
  if (!grad->allFinite()) {
    throw NumericalError("knode loss gradient is not finite");
  }
  return loss;
}

}  // namespace

void TrainConfig::Validate() const {
  if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw ConfigError("train betas must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("train.epsilon must be > 0");
  if (batch < 0) throw ConfigError("train.batch must be >= 0");
  if (stride < 1) throw ConfigError("train.stride must be >= 1");
  if (!(loss_weights.array() > 0.0).all()) {
    throw ConfigError("train.loss_weights must be positive");
  }
}

SegmentSet SegmentSet::Subset(const std::vector<Eigen::Index>& cols) const {
  SegmentSet out;
  out.dt = dt;
  const auto n = static_cast<Eigen::Index>(cols.size());
  out.start.resize(kStateDim, n);
  out.input.resize(kInputDim, n);
  out.target.resize(kStateDim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.start.col(i) = start.col(cols[i]);
    out.input.col(i) = input.col(cols[i]);
    out.target.col(i) = target.col(cols[i]);
  }
  return out;
}

SegmentSet MakeSegments(const std::vector<Trajectory>& data, int stride) {
  if (data.empty()) throw std::invalid_argument("no training trajectories");
  if (stride < 1) throw std::invalid_argument("segment stride must be >= 1");
  SegmentSet segs;
  std::vector<std::pair<const Trajectory*, std::size_t>> picks;
  for (const auto& traj : data) {
    const double dt = traj.UniformStep();
    if (segs.dt == 0.0) {
      segs.dt = dt;
    } else if (std::abs(dt - segs.dt) > 1e-9) {
      throw std::invalid_argument(
          "trajectories have inconsistent sample spacing: " +
          std::to_string(segs.dt) + " vs " + std::to_string(dt));
    }
    for (std::size_t i = 0; i + 1 < traj.size(); i += stride) {
      picks.emplace_back(&traj, i);
    }
  }
  const auto n = static_cast<Eigen::Index>(picks.size());
  segs.start.resize(kStateDim, n);
  segs.input.resize(kInputDim, n);
  segs.target.resize(kStateDim, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& [traj, i] = picks[c];
    segs.start.col(c) = traj->states[i];
    segs.input.col(c) = traj->inputs[i];
    segs.target.col(c) = traj->states[i + 1];
  }
  return segs;
}

StateVector OneStepPredict(const HybridModel& h, const StateVector& x,
                           const InputVector& u, double dt) {
  return Rk4Step(
      [&h](const StateVector& s, const InputVector& in) {
        return HybridDerivative(h, s, in);
      },
      x, u, dt);
}

double KnodeLoss(const HybridModel& h, const SegmentSet& segs,
                 const StateVector& weights) {
  return Evaluate(h, segs, weights, nullptr);
}

double KnodeLoss(const HybridModel& h, const std::vector<Trajectory>& data,
                 const StateVector& weights) {
  return KnodeLoss(h, MakeSegments(data), weights);
}

LossAndGradient KnodeLossGradients(const HybridModel& h,
                                   const SegmentSet& segs,
                                   const StateVector& weights) {
  LossAndGradient out;
  out.loss = Evaluate(h, segs, weights, &out.gradient);
  return out;
}

LossAndGradient KnodeLossGradients(const HybridModel& h,
                                   const std::vector<Trajectory>& data,
                                   const StateVector& weights) {
  return KnodeLossGradients(h, MakeSegments(data), weights);
}

TrainResult TrainKnode(const HybridModel& h,
                       const std::vector<Trajectory>& data,
                       const std::vector<Trajectory>& validation,
                       const TrainConfig& cfg) {
  cfg.Validate();
  h.Validate();
  const auto t0 = std::chrono::steady_clock::now();
  const SegmentSet train = MakeSegments(data, cfg.stride);
  const SegmentSet val =
      validation.empty() ? train : MakeSegments(validation, cfg.stride);

  TrainResult result{h, {}};
  HybridModel work = h;
  Eigen::VectorXd best_params = h.net.params();
  result.report.initial_val_loss = KnodeLoss(h, val, cfg.loss_weights);
  double best_val = result.report.initial_val_loss;

  // Adam sees the loss divided by its initial value so that epsilon acts
  // relative to the problem's own scale.
  const double initial_train = KnodeLoss(h, train, cfg.loss_weights);
  const double grad_scale = initial_train > 0.0 ? 1.0 / initial_train : 1.0;

  const Eigen::Index np = work.net.num_params();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(np);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(np);
  std::mt19937_64 rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(train.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::Index batch =
      cfg.batch == 0 ? train.size() : std::min<Eigen::Index>(cfg.batch, train.size());
  long step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (batch < train.size()) {
      // Fisher-Yates with raw engine output for a portable permutation.
      for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[rng() % (i + 1)]);
      }
    }
    double epoch_loss = 0.0;
    for (Eigen::Index begin = 0; begin < train.size(); begin += batch) {
      const Eigen::Index end = std::min(begin + batch, train.size());
      LossAndGradient lg;
      if (batch == train.size()) {
        lg = KnodeLossGradients(work, train, cfg.loss_weights);
      } else {
        const std::vector<Eigen::Index> cols(order.begin() + begin,
                                             order.begin() + end);
        lg = KnodeLossGradients(work, train.Subset(cols), cfg.loss_weights);
      }
      epoch_loss += lg.loss * static_cast<double>(end - begin);
      const Eigen::VectorXd g = lg.gradient * grad_scale;
      ++step;
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseAbs2();
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      const Eigen::VectorXd update =
          (m / bc1).array() / ((v / bc2).array().sqrt() + cfg.epsilon);
      work.net.set_params(work.net.params() - cfg.learning_rate * update);
    }
    result.report.train_loss.push_back(epoch_loss /
                                       static_cast<double>(train.size()));
    const double val_loss = KnodeLoss(work, val, cfg.loss_weights);
    if (!std::isfinite(val_loss) || !work.net.params().allFinite()) {
      throw NumericalError("training diverged at epoch " +
                           std::to_string(epoch) +
                           "; try a smaller learning rate");
    }
    if (val_loss < best_val) {
      best_val = val_loss;
      best_params = work.net.params();
      result.report.best_epoch = epoch;
    }
    result.report.best_val_loss.push_back(best_val);
  }

  result.model.net.set_params(best_params);
  result.report.final_val_loss = best_val;
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

HybridModel PrepareHybridModel(const QuadParams& params,
                               const std::vector<Trajectory>& data,
                               const std::vector<int>& hidden,
                               std::uint64_t seed, const ResidualMask& mask,
                               const FeatureVector& scale_floor) {
  HybridModel h = HybridModel::Create(params, hidden, seed, mask);
  const FeatureStats stats = ComputeFeatureStats(data, scale_floor);
  h.input_mean = stats.mean;
  h.input_scale = stats.scale;
  h.output_scale = EstimateResidualScale(data, params);
  return h;
}

}  // namespace knode
