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

#ifndef KNODE_PIPELINE_HPP_
#define KNODE_PIPELINE_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "knode/config.hpp"
#include "knode/trajectory.hpp"

namespace knode {

// Which learned models a command touches. kAll = KNODE and GP.
enum class ModelChoice { kAll, kKnode, kGp, kNominal };
ModelChoice ParseModelChoice(const std::string& name);

// Output layout below RunConfig::output_dir.
struct OutputLayout {
  std::filesystem::path root;
  std::filesystem::path data() const { return root / "data"; }
  std::filesystem::path models() const { return root / "models"; }
  std::filesystem::path eval() const { return root / "eval"; }
  std::filesystem::path TrainFile(const RefSpec& s) const;
  std::filesystem::path ValidationFile(const RefSpec& s) const;
};

// Closed-loop nominal-MPC flights of the drag plant for every training and
// validation spec, written as trajectory CSVs with parameter sidecars.
void CmdGenerate(const RunConfig& cfg);

// Trains KNODE and/or fits the GP from the generated data.
void CmdTrain(const RunConfig& cfg, ModelChoice choice);

// Prediction and tracking experiments with the trained models.
void CmdEvaluate(const RunConfig& cfg, ModelChoice choice);

void CmdRunAll(const RunConfig& cfg, ModelChoice choice);

// Reads trajectory CSVs; a missing file raises ConfigError.
std::vector<Trajectory> LoadTrajectories(
    const std::vector<std::filesystem::path>& files);

}  // namespace knode

#endif  // KNODE_PIPELINE_HPP_
