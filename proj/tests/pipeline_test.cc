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
#include "knode/pipeline.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>

#include <gtest/gtest.h>

#include "knode/experiments.hpp"
#include "knode/serialization.hpp"

namespace knode {
namespace {

namespace fs = std::filesystem;

// A scaled-down run: short flights, a tiny network and a small GP.
RunConfig SmallConfig(const fs::path& out) {
  return LoadRunConfig(
      std::nullopt,
      {"simulation.duration=1.0", "reference.ramp_time=0.5",
       "train.epochs=3", "knode.hidden=[8]", "gp.points=20", "gp.grid=4",
       R"(data.train=[{"kind":"circle","radius":2,"speed":2},)"
       R"({"kind":"circle","radius":3,"speed":2,"clockwise":true}])",
       R"(data.validation=[{"kind":"circle","radius":2.5,"speed":2}])",
       R"(evaluation.prediction=[{"kind":"circle","radius":2,"speed":2},)"
       R"({"kind":"lemniscate","radius":2,"speed":2}])",
       R"(evaluation.tracking=[{"kind":"circle","radius":1,"speed":2}])"},
      std::nullopt, out);
}

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

std::string ReadBytes(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> NonTimingFiles(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), root).string();
    if (rel.find("timing") != std::string::npos) continue;
    out[rel] = ReadBytes(e.path());
  }
  return out;
}

TEST(ModelChoiceTest, ParsesNames) {
  EXPECT_EQ(ParseModelChoice("all"), ModelChoice::kAll);
  EXPECT_EQ(ParseModelChoice("knode"), ModelChoice::kKnode);
  EXPECT_EQ(ParseModelChoice("gp"), ModelChoice::kGp);
  EXPECT_EQ(ParseModelChoice("nominal"), ModelChoice::kNominal);
  EXPECT_THROW(ParseModelChoice("svm"), ConfigError);
}

TEST(PipelineTest, GenerateWritesFlightsWithSidecars) {
  const RunConfig cfg = SmallConfig(FreshDir("knode_pipe_gen"));
  CmdGenerate(cfg);
  const OutputLayout out{cfg.output_dir};
  for (const RefSpec& s : cfg.train_specs) {
    const Trajectory t = ReadTrajectoryCsv(out.TrainFile(s));
    EXPECT_EQ(t.size(), 501u);
    EXPECT_EQ(ReadTrajectorySidecar(out.TrainFile(s)).drag.linear,
              cfg.drag.linear);
  }
  EXPECT_EQ(ReadTrajectoryCsv(out.ValidationFile(cfg.validation_specs[0])).size(),
            501u);
  const Json manifest = ReadJsonFile(out.data() / "manifest.json");
  EXPECT_EQ(manifest["command"], "generate");
  EXPECT_EQ(manifest["config_hash"], cfg.Hash());
  EXPECT_EQ(manifest["files"].size(), 6u);
  for (const auto& [rel, hash] : manifest["files"].items()) {
    EXPECT_EQ(hash, Fnv1aHex(ReadBytes(out.data() / rel))) << rel;
  }
}

TEST(PipelineTest, TrainRequiresGeneratedData) {
  const RunConfig cfg = SmallConfig(FreshDir("knode_pipe_nodata"));
  EXPECT_THROW(CmdTrain(cfg, ModelChoice::kAll), ConfigError);
  EXPECT_THROW(CmdEvaluate(cfg, ModelChoice::kAll), ConfigError);
}

TEST(PipelineTest, GpOnlyTrainingAndMissingModels) {
  const RunConfig cfg = SmallConfig(FreshDir("knode_pipe_gp"));
  CmdGenerate(cfg);
  CmdTrain(cfg, ModelChoice::kGp);
  const OutputLayout out{cfg.output_dir};
  const Json gp = ReadJsonFile(out.models() / "gp.json");
  EXPECT_EQ(gp["inputs"].size(), 20u);
  EXPECT_FALSE(fs::exists(out.models() / "knode.json"));
  EXPECT_THROW(CmdEvaluate(cfg, ModelChoice::kKnode), ConfigError);
}

TEST(PipelineTest, RunAllIsDeterministicAndComplete) {
  const fs::path dir = FreshDir("knode_pipe_all");
  const RunConfig cfg = SmallConfig(dir);
  CmdRunAll(cfg, ModelChoice::kAll);
  const auto first = NonTimingFiles(dir);
  CmdRunAll(cfg, ModelChoice::kAll);
  const auto second = NonTimingFiles(dir);
  ASSERT_EQ(first.size(), second.size());
  for (const auto& [rel, bytes] : first) {
    ASSERT_TRUE(second.count(rel)) << rel;
    EXPECT_TRUE(second.at(rel) == bytes) << rel;
  }
  for (const char* rel :
       {"resolved_config.json", "manifest.json", "models/knode.json",
        "models/train_report.json", "models/train_timing.json",
        "eval/prediction_errors.csv", "eval/tracking_errors.csv",
        "eval/summary.json", "eval/mpc_timing.json"}) {
    EXPECT_TRUE(fs::exists(dir / rel)) << rel;
  }
  // Two prediction specs times three models, one tracking spec times three.
  EXPECT_EQ(ReadErrorTable(dir / "eval/prediction_errors.csv").size(), 6u);
  EXPECT_EQ(ReadErrorTable(dir / "eval/tracking_errors.csv").size(), 3u);
  const Json report = ReadJsonFile(dir / "models/train_report.json");
  EXPECT_EQ(report["epochs"], 3);
  EXPECT_EQ(report["config_hash"], cfg.Hash());
}

#ifdef KNODE_MPC_BINARY
int RunCli(const std::string& args) {
  const std::string cmd =
      std::string(KNODE_MPC_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  const fs::path dir = FreshDir("knode_cli");
  const std::string out = " --out " + dir.string();
  EXPECT_EQ(RunCli("--help"), 0);
  EXPECT_EQ(RunCli("--print-config generate"), 0);
  EXPECT_EQ(RunCli(""), 2);
  EXPECT_EQ(RunCli("bogus"), 2);
  EXPECT_EQ(RunCli("train --model svm" + out), 2);
  EXPECT_EQ(RunCli("train --set train.nope=1" + out), 2);
  EXPECT_EQ(RunCli("train --set simulation.duration=0" + out), 2);
  EXPECT_EQ(RunCli("train --config /nonexistent/cfg.json" + out), 2);
  EXPECT_EQ(RunCli("train" + out), 2);
  EXPECT_EQ(RunCli("evaluate" + out), 2);
}
#endif

}  // namespace
}  // namespace knode
