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

#ifndef KNODE_TRAJECTORY_HPP_
#define KNODE_TRAJECTORY_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "knode/dynamics.hpp"
#include "knode/types.hpp"

namespace knode {

// Time-stamped (state, input) samples. inputs[i] is the input held over
// [times[i], times[i+1]); the final input repeats the last applied one.
struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<InputVector> inputs;

  std::size_t size() const { return times.size(); }

  // Throws std::invalid_argument unless lengths agree, there are at least two
  // samples, and times increase strictly.
  void Validate() const;

  // Mean spacing; throws std::invalid_argument if spacing deviates from it by
  // more than `tolerance`.
  double UniformStep(double tolerance = 1e-9) const;

  std::vector<Vec3> Positions() const;
};

// CSV layout: header `t,x0..x11,u0..u3`, 17 columns, %.12g.
void WriteTrajectoryCsv(const Trajectory& traj,
                        const std::filesystem::path& path);
Trajectory ReadTrajectoryCsv(const std::filesystem::path& path);

// JSON sidecar next to a trajectory CSV recording the physical parameters
// that produced it.
struct TrajectoryMetadata {
  QuadParams quad;
  DragParams drag;
  std::string label;
};

std::filesystem::path SidecarPath(const std::filesystem::path& csv_path);
void WriteTrajectorySidecar(const TrajectoryMetadata& meta,
                            const std::filesystem::path& csv_path);
TrajectoryMetadata ReadTrajectorySidecar(
    const std::filesystem::path& csv_path);

}  // namespace knode

#endif  // KNODE_TRAJECTORY_HPP_
