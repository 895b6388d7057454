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
#include "knode/experiments.hpp"

#include <cmath>
#include <numbers>
#include <filesystem>
#include <limits>

#include <gtest/gtest.h>

namespace knode {
namespace {

const QuadParams kQuad;

ExperimentSettings ShortSettings() {
  ExperimentSettings s;
  s.duration = 1.0;
  s.mpc = MpcConfig::Defaults(kQuad);
  return s;
}

RefSpec SmallCircle() {
  RefSpec s;
  s.radius = 1.0;
  s.period = std::numbers::pi;
  s.ramp_time = 0.5;
  return s;
}

TEST(ScorePositionsTest, HandComputedValues) {
  const std::vector<Vec3> a = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  const std::vector<Vec3> b = {Vec3(0, 0, 0), Vec3(1, 2, 0)};
  const ErrorRow r = ScorePositions("s", "m", a, b);
  EXPECT_EQ(r.dtw_raw, 2.0);
  EXPECT_EQ(r.dtw_normalized, 1.0);
  EXPECT_DOUBLE_EQ(r.rmse, std::sqrt(2.0));
  EXPECT_THROW(ScorePositions("s", "m", a, {Vec3::Zero()}),
               std::invalid_argument);
}

TEST(PredictionExperimentTest, ExactModelReproducesTruth) {
  const NominalModel nominal(kQuad);
  const PlantModel drag_free(kQuad, DragParams::Zero());
  const ExperimentSettings s = ShortSettings();
  const PredictionOutcome out = PredictionExperiment(
      {{"nominal", &nominal}}, drag_free, nominal, {SmallCircle()}, s);
  ASSERT_EQ(out.rows.size(), 1u);
  EXPECT_LT(out.rows[0].dtw_raw, 1e-6);
  EXPECT_LT(out.one_step[0].position_rmse, 1e-9);
  ASSERT_EQ(out.cases.size(), 1u);
  EXPECT_EQ(out.cases[0].truth.size(), 501u);
}

TEST(PredictionExperimentTest, MismatchedModelDrifts) {
  const NominalModel nominal(kQuad);
  const PlantModel plant(kQuad, DragParams{});
  const PredictionOutcome out =
      PredictionExperiment({{"nominal", &nominal}, {"plant", &plant}}, plant,
                           nominal, {SmallCircle()}, ShortSettings());
  ASSERT_EQ(out.rows.size(), 2u);
  EXPECT_GT(out.rows[0].dtw_raw, 1.0);
  EXPECT_LT(out.rows[1].dtw_raw, 1e-6);
}

TEST(TrackingExperimentTest, RowsPerControllerAndPlannedReference) {
  const NominalModel nominal(kQuad);
  const PlantModel plant(kQuad, DragParams{});
  const ExperimentSettings s = ShortSettings();
  const TrackingOutcome out = TrackingExperiment(
      {{"nominal", &nominal}, {"plant", &plant}}, plant, {SmallCircle()}, s);
  ASSERT_EQ(out.rows.size(), 2u);
  EXPECT_EQ(out.rows[0].spec, "circle_r1");
  EXPECT_EQ(out.rows[1].model, "plant");
  EXPECT_LT(out.rows[1].dtw_raw, out.rows[0].dtw_raw);
  ASSERT_EQ(out.cases[0].reference.size(), 501u);
  EXPECT_EQ(out.cases[0].flights.size(), 2u);
}

TEST(ErrorTableTest, RoundTripIncludingInfinity) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<ErrorRow> rows = {
      {"circle_r2", "knode", 12.5, 0.0031, 0.04},
      {"circle_r2", "gp", inf, inf, inf},
      {"lemniscate_r4", "nominal", 1.0 / 3.0, 2e-17, 1e5}};
  const auto path =
      std::filesystem::temp_directory_path() / "knode_error_table.csv";
  WriteErrorTable(rows, path);
  const std::vector<ErrorRow> back = ReadErrorTable(path);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].spec, rows[i].spec);
    EXPECT_EQ(back[i].model, rows[i].model);
    if (std::isinf(rows[i].dtw_raw)) {
      EXPECT_TRUE(std::isinf(back[i].dtw_raw) && std::isinf(back[i].rmse));
      continue;
    }
    EXPECT_NEAR(back[i].dtw_raw, rows[i].dtw_raw,
                1e-11 * std::abs(rows[i].dtw_raw));
    EXPECT_NEAR(back[i].rmse, rows[i].rmse, 1e-11 * std::abs(rows[i].rmse));
  }
  EXPECT_TRUE(std::isinf(back[1].dtw_normalized));
  std::filesystem::remove(path);
}

TEST(MeanRelativeReductionTest, AveragesPerSpecRatios) {
  const std::vector<ErrorRow> rows = {{"a", "base", 10, 0, 0},
                                      {"a", "m", 5, 0, 0},
                                      {"b", "base", 4, 0, 0},
                                      {"b", "m", 3, 0, 0},
                                      {"c", "m", 1, 0, 0}};
  EXPECT_DOUBLE_EQ(MeanRelativeReduction(rows, "m", "base"),
                   (0.5 + 0.25) / 2.0);
  EXPECT_THROW(MeanRelativeReduction(rows, "x", "base"), std::invalid_argument);
}

}  // namespace
}  // namespace knode
