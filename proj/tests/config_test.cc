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
#include "knode/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

namespace knode {
namespace {

RunConfig Parse(const Json& user) {
  return ParseRunConfig(MergeConfig(DefaultConfigJson(), user));
}

TEST(ConfigTest, DefaultsParse) {
  const RunConfig c = ParseRunConfig(DefaultConfigJson());
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.duration, 8.0);
  EXPECT_EQ(c.plant_dt, 0.002);
  EXPECT_EQ(c.train_specs.size(), 2u);
  EXPECT_EQ(c.validation_specs.size(), 1u);
  EXPECT_EQ(c.prediction_specs.size(), 8u);
  EXPECT_EQ(c.tracking_specs.size(), 4u);
  EXPECT_EQ(c.gp_points, 80);
  EXPECT_EQ(c.gp.noise_std, 1e-4);
  EXPECT_EQ(c.mpc.horizon, 20);
  EXPECT_EQ(c.mpc.dt, 0.02);
  EXPECT_EQ(c.mpc.u_max(0), 2.0 * c.quad.HoverThrust());
  EXPECT_EQ(c.quad.mass, 0.5);
}

TEST(ConfigTest, SpeedSetsPeriod) {
  const RunConfig c = ParseRunConfig(DefaultConfigJson());
  const RefSpec& s = c.train_specs[0];
  EXPECT_EQ(s.kind, CurveKind::kCircle);
  EXPECT_NEAR(s.period, 2.0 * std::numbers::pi * 3.0 / 2.0, 1e-12);
  EXPECT_TRUE(c.train_specs[1].clockwise);
  const RefSpec& lem = c.prediction_specs[5];
  EXPECT_EQ(lem.kind, CurveKind::kLemniscate);
  // The crossing-point speed of the lemniscate equals the configured speed.
  EXPECT_NEAR(EvaluateCurve(lem, lem.period / 4).velocity.norm(), 2.0, 1e-12);
}

TEST(ConfigTest, UnknownKeyIsRejectedWithPath) {
  Json user;
  user["train"]["epochz"] = 3;
  try {
    Parse(user);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("train.epochz"), std::string::npos);
  }
}

TEST(ConfigTest, TypeMismatchIsRejected) {
  Json user;
  user["mpc"]["horizon"] = "twenty";
  EXPECT_THROW(Parse(user), ConfigError);
  Json user2;
  user2["mpc"]["use_state_bounds"] = 1;
  EXPECT_THROW(Parse(user2), ConfigError);
}

TEST(ConfigTest, InvalidValuesAreRejected) {
  const char* bad[] = {
      R"({"simulation": {"duration": 0}})",
      R"({"simulation": {"duration": 1.0005}})",
      R"({"mpc": {"horizon": 0}})",
      R"({"mpc": {"dt": 0.003}})",
      R"({"train": {"epochs": 1.5}})",
      R"({"train": {"learning_rate": -1}})",
      R"({"gp": {"points": 0}})",
      R"({"knode": {"mask": "diag"}})",
      R"({"seed": -1})",
      R"({"data": {"train": []}})",
      R"({"data": {"train": [{"kind": "square", "radius": 1, "speed": 1}]}})",
      R"({"data": {"train": [{"kind": "circle", "radius": 1}]}})",
      R"({"data": {"train": [{"kind": "circle", "radius": 1, "speed": 1,
                               "period": 3}]}})",
      R"({"data": {"train": [{"kind": "circle", "radius": 1, "speed": 1,
                               "colour": 3}]}})",
      R"({"data": {"train": [{"kind": "circle", "radius": 1, "speed": 1},
                             {"kind": "circle", "radius": 1, "speed": 2}]}})",
  };
  for (const char* text : bad) {
    EXPECT_THROW(Parse(Json::parse(text)), ConfigError) << text;
  }
}

TEST(ConfigTest, OverridesParseJsonValues) {
  Json doc = DefaultConfigJson();
  ApplyOverride(doc, "train.epochs=7");
  ApplyOverride(doc, "knode.hidden=[8,4]");
  ApplyOverride(doc, "knode.mask=velocity");
  ApplyOverride(doc, "mpc.use_state_bounds=true");
  const RunConfig c = ParseRunConfig(doc);
  EXPECT_EQ(c.train.epochs, 7);
  EXPECT_EQ(c.hidden, (std::vector<int>{8, 4}));
  EXPECT_TRUE(c.mpc.use_state_bounds);
  EXPECT_THROW(ApplyOverride(doc, "train.nope=1"), ConfigError);
  EXPECT_THROW(ApplyOverride(doc, "train.epochs"), ConfigError);
  EXPECT_THROW(ApplyOverride(doc, "train.epochs=many"), ConfigError);
}

TEST(ConfigTest, LoadLayersFileOverridesSeedAndOutput) {
  const auto path = std::filesystem::temp_directory_path() /
                    "knode_config_test.json";
  {
    std::ofstream f(path);
    f << R"({"seed": 4, "train": {"epochs": 11, "stride": 2}})";
  }
  const RunConfig c =
      LoadRunConfig(path, {"train.epochs=12"}, std::uint64_t{9}, "elsewhere");
  EXPECT_EQ(c.train.epochs, 12);
  EXPECT_EQ(c.train.stride, 2);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.output_dir, "elsewhere");
  std::filesystem::remove(path);
  EXPECT_THROW(LoadRunConfig(path, {}), ConfigError);
}

TEST(ConfigTest, HashIgnoresOutputDirOnly) {
  const RunConfig a = LoadRunConfig(std::nullopt, {}, {}, "a");
  const RunConfig b = LoadRunConfig(std::nullopt, {}, {}, "b");
  const RunConfig c = LoadRunConfig(std::nullopt, {"train.epochs=1"}, {}, "a");
  const RunConfig d = LoadRunConfig(std::nullopt, {}, std::uint64_t{1}, "a");
  EXPECT_EQ(a.Hash(), b.Hash());
  EXPECT_NE(a.Hash(), c.Hash());
  EXPECT_NE(a.Hash(), d.Hash());
  EXPECT_EQ(a.Hash().size(), 16u);
}

TEST(ConfigTest, Fnv1aKnownValues) {
  EXPECT_EQ(Fnv1aHex(""), "cbf29ce484222325");
  EXPECT_EQ(Fnv1aHex("a"), "af63dc4c8601ec8c");
}

}  // namespace
}  // namespace knode
