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

#include "knode/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "knode/serialization.hpp"

namespace knode {

void Trajectory::Validate() const {
  if (times.size() != states.size() || times.size() != inputs.size()) {
    throw std::invalid_argument("trajectory: length mismatch");
  }
  if (times.size() < 2) {
    throw std::invalid_argument("trajectory: needs at least two samples");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("trajectory: times must increase strictly");
    }
  }
}

double Trajectory::UniformStep(double tolerance) const {
  Validate();
  const double dt = (times.back() - times.front()) /
                    static_cast<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - dt) > tolerance) {
      throw std::invalid_argument("trajectory: non-uniform sample spacing");
    }
  }
  return dt;
}

std::vector<Vec3> Trajectory::Positions() const {
  std::vector<Vec3> out;
  out.reserve(states.size());
  for (const auto& x : states) out.emplace_back(x.segment<3>(idx::kPos));
  return out;
}

void WriteTrajectoryCsv(const Trajectory& traj,
                        const std::filesystem::path& path) {
  traj.Validate();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "t";
  for (int i = 0; i < kStateDim; ++i) os << ",x" << i;
  for (int i = 0; i < kInputDim; ++i) os << ",u" << i;
  os << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    os << buf;
  };
  for (std::size_t r = 0; r < traj.size(); ++r) {
    put(traj.times[r]);
    for (int i = 0; i < kStateDim; ++i) {
      os << ',';
      put(traj.states[r](i));
    }
    for (int i = 0; i < kInputDim; ++i) {
      os << ',';
      put(traj.inputs[r](i));
    }
    os << '\n';
  }
}

Trajectory ReadTrajectoryCsv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("file not found: " + path.string());
  std::string line;
  if (!std::getline(is, line)) {
    throw std::invalid_argument(path.string() + ": empty trajectory file");
  }
  Trajectory traj;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double values[1 + kStateDim + kInputDim];
    int n = 0;
    while (std::getline(ss, cell, ',')) {
      if (n >= 1 + kStateDim + kInputDim) break;
      values[n++] = std::stod(cell);
    }
    if (n != 1 + kStateDim + kInputDim) {
      throw std::invalid_argument(path.string() + ": row " +
                                  std::to_string(row) + " has " +
                                  std::to_string(n) + " columns");
    }
    traj.times.push_back(values[0]);
    traj.states.emplace_back(
        Eigen::Map<const StateVector>(values + 1));
    traj.inputs.emplace_back(
        Eigen::Map<const InputVector>(values + 1 + kStateDim));
  }
  traj.Validate();
  return traj;
}

std::filesystem::path SidecarPath(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void WriteTrajectorySidecar(const TrajectoryMetadata& meta,
                            const std::filesystem::path& csv_path) {
  nlohmann::ordered_json j;
  j["label"] = meta.label;
  j["quad"] = ToJson(meta.quad);
  j["drag"] = ToJson(meta.drag);
  WriteJsonFile(j, SidecarPath(csv_path));
}

TrajectoryMetadata ReadTrajectorySidecar(
    const std::filesystem::path& csv_path) {
  const auto j = ReadJsonFile(SidecarPath(csv_path));
  TrajectoryMetadata meta;
  meta.label = j.value("label", "");
  meta.quad = QuadParamsFromJson(j.at("quad"));
  meta.drag = DragParamsFromJson(j.at("drag"));
  return meta;
}

}  // namespace knode
