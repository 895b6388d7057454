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

// knode_mpc: generate training data, train KNODE/GP models, and evaluate
// prediction and closed-loop tracking.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 1 anything else.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "knode/pipeline.hpp"
#include "knode/types.hpp"

int main(int argc, char** argv) {
  CLI::App app{"KNODE-MPC: learned quadrotor dynamics for model predictive "
               "control"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::string model = "all";
  std::optional<std::uint64_t> seed;
  bool print_config = false;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--set", overrides, "Override, e.g. train.epochs=100")
      ->take_all()
      ->allow_extra_args(false);
  app.add_option("--model", model, "knode, gp, nominal or all")
      ->check(CLI::IsMember({"knode", "gp", "nominal", "all"}));
  app.add_option("--seed", seed, "Seed for network initialization");
  app.add_flag("--print-config", print_config,
               "Print the resolved config and exit");

  auto* generate = app.add_subcommand("generate", "Fly training data")
                       ->fallthrough();
  auto* train = app.add_subcommand("train", "Train models")->fallthrough();
  auto* evaluate =
      app.add_subcommand("evaluate", "Prediction and tracking experiments")
          ->fallthrough();
  auto* run_all =
      app.add_subcommand("run-all", "generate, train and evaluate")
          ->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::optional<std::filesystem::path> path;
    if (!config_path.empty()) path = config_path;
    std::optional<std::filesystem::path> out;
    if (!out_dir.empty()) out = out_dir;
    const knode::RunConfig cfg =
        knode::LoadRunConfig(path, overrides, seed, out);
    if (print_config) {
      std::cout << cfg.resolved.dump(2) << "\n";
      return 0;
    }
    const knode::ModelChoice choice = knode::ParseModelChoice(model);
    if (generate->parsed()) knode::CmdGenerate(cfg);
    if (train->parsed()) knode::CmdTrain(cfg, choice);
    if (evaluate->parsed()) knode::CmdEvaluate(cfg, choice);
    if (run_all->parsed()) knode::CmdRunAll(cfg, choice);
  } catch (const knode::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const knode::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
