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

#ifndef KNODE_EXPERIMENTS_HPP_
#define KNODE_EXPERIMENTS_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "knode/closed_loop.hpp"
#include "knode/dtw.hpp"
#include "knode/models.hpp"
#include "knode/mpc.hpp"
#include "knode/reference.hpp"
#include "knode/trajectory.hpp"

namespace knode {

struct NamedModel {
  std::string name;
  const ContinuousModel* model = nullptr;
};

struct ExperimentSettings {
  double duration = 8.0;
  double plant_dt = 0.002;
  MpcConfig mpc;
  Rk45Options integrator;
};

// One line of an error table. Diverged runs are reported as +inf.
struct ErrorRow {
  std::string spec;
  std::string model;
  double dtw_raw = 0.0;
  double dtw_normalized = 0.0;
  double rmse = 0.0;  // time-aligned position RMSE
};

// Chained one-step prediction error from recorded states.
struct OneStepRow {
  std::string spec;
  std::string model;
  double state_rmse = 0.0;
  double position_rmse = 0.0;
};

ErrorRow ScorePositions(const std::string& spec, const std::string& model,
                        const std::vector<Vec3>& truth,
                        const std::vector<Vec3>& other);

// Reference sampled on the plant grid, long enough for closed-loop runs.
Reference ExperimentReference(const RefSpec& spec,
                              const ExperimentSettings& settings);

struct PredictionCase {
  RefSpec spec;
  Trajectory truth;
  std::vector<Trajectory> predictions;  // per model; empty if diverged
};

struct PredictionOutcome {
  std::vector<ErrorRow> rows;
  std::vector<OneStepRow> one_step;
  std::vector<PredictionCase> cases;
};

// For each spec the plant is flown with `controller` to produce ground truth,
// then every model re-simulates the whole flight open loop from the recorded
// initial state under the recorded inputs.
PredictionOutcome PredictionExperiment(const std::vector<NamedModel>& models,
                                       const ContinuousModel& plant,
                                       const ContinuousModel& controller,
                                       const std::vector<RefSpec>& specs,
                                       const ExperimentSettings& settings);

struct TrackingCase {
  RefSpec spec;
  Trajectory reference;                  // planned states on the plant grid
  std::vector<ClosedLoopResult> flights;  // per controller
};

struct TrackingOutcome {
  std::vector<ErrorRow> rows;
  std::vector<TrackingCase> cases;
};

// Closed-loop flights of the plant under MPC with each controller model,
// scored against the planned reference positions.
TrackingOutcome TrackingExperiment(const std::vector<NamedModel>& controllers,
                                   const ContinuousModel& plant,
                                   const std::vector<RefSpec>& specs,
                                   const ExperimentSettings& settings);

// CSV header `spec,model,dtw_raw,dtw_normalized,rmse`, values in %.12g.
void WriteErrorTable(const std::vector<ErrorRow>& rows,
                     const std::filesystem::path& path);
std::vector<ErrorRow> ReadErrorTable(const std::filesystem::path& path);
void WriteOneStepTable(const std::vector<OneStepRow>& rows,
                       const std::filesystem::path& path);

// Mean over rows of `model` of (1 - dtw_raw / dtw_raw of `baseline` on the
// same spec).
double MeanRelativeReduction(const std::vector<ErrorRow>& rows,
                             const std::string& model,
                             const std::string& baseline);

}  // namespace knode

#endif  // KNODE_EXPERIMENTS_HPP_
