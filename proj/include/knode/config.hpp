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

#ifndef KNODE_CONFIG_HPP_
#define KNODE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "knode/dynamics.hpp"
#include "knode/gp.hpp"
#include "knode/hybrid.hpp"
#include "knode/integrators.hpp"
#include "knode/mpc.hpp"
#include "knode/reference.hpp"
#include "knode/serialization.hpp"
#include "knode/training.hpp"

namespace knode {

// Everything a pipeline run needs, parsed from one JSON document. `resolved`
// keeps that document (defaults expanded) for writing next to outputs.
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  QuadParams quad;
  DragParams drag;
  double duration = 8.0;
  double plant_dt = 0.002;
  Rk45Options integrator;
  std::vector<RefSpec> train_specs;
  std::vector<RefSpec> validation_specs;
  std::vector<RefSpec> prediction_specs;
  std::vector<RefSpec> tracking_specs;
  std::vector<int> hidden;
  ResidualMask mask = FullMask();
  FeatureVector scale_floor = DefaultFeatureScaleFloor();
  TrainConfig train;
  int gp_points = 80;
  GpSelectionOptions gp;
  MpcConfig mpc;
  bool tracking_sanity = true;
  bool dump_trajectories = true;
  Json resolved;

  // FNV-1a of the compact resolved document without output_dir, as 16 hex
  // digits. Runs that differ only in where they write share a hash.
  std::string Hash() const;
};

// The full default document. Every key accepted in a config file appears
// here.
Json DefaultConfigJson();

// Overlays `user` on `base`. Keys absent from `base` and type changes raise
// ConfigError naming the offending path. Arrays are replaced whole.
Json MergeConfig(const Json& base, const Json& user);

// Applies one `section.key=value` override in place. The value is parsed as
// JSON and falls back to a plain string.
void ApplyOverride(Json& doc, const std::string& assignment);

// Validates the merged document and builds the typed config. Throws
// ConfigError on any invalid value.
RunConfig ParseRunConfig(const Json& doc);

// Defaults, then the file at `path` (if any), then overrides, then the
// explicit seed and output directory.
RunConfig LoadRunConfig(const std::optional<std::filesystem::path>& path,
                        const std::vector<std::string>& overrides,
                        std::optional<std::uint64_t> seed = {},
                        std::optional<std::filesystem::path> output_dir = {});

std::string Fnv1aHex(const std::string& bytes);

}  // namespace knode

#endif  // KNODE_CONFIG_HPP_
