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

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "knode/closed_loop.hpp"
#include "knode/experiments.hpp"
#include "knode/models.hpp"
#include "knode/serialization.hpp"
#include "knode/training.hpp"

namespace knode {
namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

std::string FileHash(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(is)),
                          std::istreambuf_iterator<char>());
  return Fnv1aHex(bytes);
}

// Wall-clock measurements live in files named *timing*; they are the only
// artifacts that differ between identical runs.
bool IsTimingFile(const std::string& name) {
  return name.find("timing") != std::string::npos;
}

// Lists every file in `dir` (recursively, sorted) with its content hash, plus
// what is needed to re-run: tool version, command, seed and the resolved
// config with its hash. Timing files are listed without a hash.
void WriteManifest(const fs::path& dir, const RunConfig& cfg,
                   const std::string& command) {
  std::map<std::string, std::string> files;
  std::vector<std::string> timing;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), dir).generic_string();
    if (rel == "manifest.json") continue;
    if (IsTimingFile(rel)) {
      timing.push_back(rel);
    } else {
      files[rel] = FileHash(entry.path());
    }
  }
  std::sort(timing.begin(), timing.end());
  Json j;
  j["tool"] = "knode_mpc";
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["config_hash"] = cfg.Hash();
  j["config"] = cfg.resolved;
  j["files"] = Json::object();
  for (const auto& [name, hash] : files) j["files"][name] = hash;
  j["timing_files"] = timing;
  WriteJsonFile(j, dir / "manifest.json");
}

void WriteRootRecord(const RunConfig& cfg, const std::string& command) {
  fs::create_directories(cfg.output_dir);
  WriteJsonFile(cfg.resolved, cfg.output_dir / "resolved_config.json");
  Json j;
  j["tool"] = "knode_mpc";
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["config_hash"] = cfg.Hash();
  WriteJsonFile(j, cfg.output_dir / "manifest.json");
}

ExperimentSettings Settings(const RunConfig& cfg) {
  ExperimentSettings s;
  s.duration = cfg.duration;
  s.plant_dt = cfg.plant_dt;
  s.mpc = cfg.mpc;
  s.integrator = cfg.integrator;
  return s;
}

Trajectory Fly(const RunConfig& cfg, const RefSpec& spec) {
  const NominalModel controller(cfg.quad);
  const PlantModel plant(cfg.quad, cfg.drag);
  const ExperimentSettings s = Settings(cfg);
  return ClosedLoopSimulate(controller, plant, ExperimentReference(spec, s),
                            cfg.duration, cfg.mpc,
                            {cfg.plant_dt, cfg.integrator})
      .trajectory;
}

std::vector<fs::path> TrainFiles(const RunConfig& cfg) {
  const OutputLayout out{cfg.output_dir};
  std::vector<fs::path> files;
  for (const RefSpec& s : cfg.train_specs) files.push_back(out.TrainFile(s));
  return files;
}

std::vector<fs::path> ValidationFiles(const RunConfig& cfg) {
  const OutputLayout out{cfg.output_dir};
  std::vector<fs::path> files;
  for (const RefSpec& s : cfg.validation_specs) {
    files.push_back(out.ValidationFile(s));
  }
  return files;
}

Json ReportJson(const TrainReport& r, const RunConfig& cfg) {
  Json j;
  j["config_hash"] = cfg.Hash();
  j["epochs"] = cfg.train.epochs;
  j["initial_val_loss"] = r.initial_val_loss;
  j["final_val_loss"] = r.final_val_loss;
  j["val_loss_ratio"] = r.initial_val_loss > 0.0
                            ? r.final_val_loss / r.initial_val_loss
                            : 0.0;
  j["best_epoch"] = r.best_epoch;
  j["train_loss"] = r.train_loss;
  j["best_val_loss"] = r.best_val_loss;
  return j;
}

Json LogJson(const ClosedLoopResult& flight) {
  Json j;
  Json t = Json::array(), cost = Json::array(), it = Json::array(),
       kkt = Json::array(), conv = Json::array();
  for (const MpcStepLog& l : flight.log) {
    t.push_back(l.t);
    cost.push_back(l.cost);
    it.push_back(l.iterations);
    kkt.push_back(l.kkt_residual);
    conv.push_back(l.converged);
  }
  j["t"] = t;
  j["cost"] = cost;
  j["iterations"] = it;
  j["kkt_residual"] = kkt;
  j["converged"] = conv;
  return j;
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Headline ratios of the prediction table, split by curve kind.
Json PredictionSummary(const std::vector<ErrorRow>& rows,
                       const std::vector<RefSpec>& specs) {
  std::map<std::string, std::map<std::string, double>> dtw;
  for (const ErrorRow& r : rows) dtw[r.spec][r.model] = r.dtw_raw;
  Json j = Json::object();
  for (const auto kind : {CurveKind::kCircle, CurveKind::kLemniscate}) {
    std::vector<double> k_over_n, k_vs_g, knode, gp, nominal;
    for (const RefSpec& s : specs) {
      if (s.kind != kind) continue;
      auto& m = dtw[s.Name()];
      if (!m.count("knode") || !m.count("nominal")) continue;
      k_over_n.push_back(m["knode"] / m["nominal"]);
      knode.push_back(m["knode"]);
      nominal.push_back(m["nominal"]);
      if (m.count("gp")) {
        k_vs_g.push_back(1.0 - m["knode"] / m["gp"]);
        gp.push_back(m["gp"]);
      }
    }
    if (knode.empty()) continue;
    Json s;
    double worst = 0.0;
    for (double v : k_over_n) worst = std::max(worst, v);
    s["max_knode_over_nominal"] = worst;
    s["mean_dtw_knode"] = Mean(knode);
    s["mean_dtw_nominal"] = Mean(nominal);
    if (!gp.empty()) {
      s["mean_dtw_gp"] = Mean(gp);
      s["mean_improvement_knode_vs_gp"] = Mean(k_vs_g);
      s["improvement_of_means_knode_vs_gp"] = 1.0 - Mean(knode) / Mean(gp);
    }
    j[kind == CurveKind::kCircle ? "circle" : "lemniscate"] = s;
  }
  return j;
}

}  // namespace

ModelChoice ParseModelChoice(const std::string& name) {
  if (name == "all") return ModelChoice::kAll;
  if (name == "knode") return ModelChoice::kKnode;
  if (name == "gp") return ModelChoice::kGp;
  if (name == "nominal") return ModelChoice::kNominal;
  throw ConfigError("--model must be knode, gp, nominal or all");
}

fs::path OutputLayout::TrainFile(const RefSpec& s) const {
  return data() / ("train_" + s.Name() + ".csv");
}

fs::path OutputLayout::ValidationFile(const RefSpec& s) const {
  return data() / ("val_" + s.Name() + ".csv");
}

std::vector<Trajectory> LoadTrajectories(const std::vector<fs::path>& files) {
  std::vector<Trajectory> out;
  for (const fs::path& f : files) {
    if (!fs::exists(f)) {
      throw ConfigError("data file not found: " + f.string() +
                        " (run `generate` first)");
    }
    out.push_back(ReadTrajectoryCsv(f));
  }
  return out;
}

void CmdGenerate(const RunConfig& cfg) {
  const OutputLayout out{cfg.output_dir};
  WriteRootRecord(cfg, "generate");
  fs::create_directories(out.data());
  auto emit = [&](const RefSpec& spec, const fs::path& path,
                  const std::string& label) {
    WriteTrajectoryCsv(Fly(cfg, spec), path);
    WriteTrajectorySidecar({cfg.quad, cfg.drag, label}, path);
  };
  for (const RefSpec& s : cfg.train_specs) {
    emit(s, out.TrainFile(s), "train " + s.Name());
  }
  for (const RefSpec& s : cfg.validation_specs) {
    emit(s, out.ValidationFile(s), "validation " + s.Name());
  }
  WriteManifest(out.data(), cfg, "generate");
}

void CmdTrain(const RunConfig& cfg, ModelChoice choice) {
  const OutputLayout out{cfg.output_dir};
  const std::vector<fs::path> train_files = TrainFiles(cfg);
  const std::vector<Trajectory> train = LoadTrajectories(train_files);
  const std::vector<Trajectory> val = LoadTrajectories(ValidationFiles(cfg));
  WriteRootRecord(cfg, "train");
  fs::create_directories(out.models());

  if (choice == ModelChoice::kAll || choice == ModelChoice::kKnode) {
    const HybridModel init = PrepareHybridModel(
        cfg.quad, train, cfg.hidden, cfg.seed, cfg.mask, cfg.scale_floor);
    const TrainResult result = TrainKnode(init, train, val, cfg.train);
    WriteJsonFile(ToJson(result.model), out.models() / "knode.json");
    WriteJsonFile(ReportJson(result.report, cfg),
                  out.models() / "train_report.json");
    WriteJsonFile(Json{{"wall_seconds", result.report.wall_seconds}},
                  out.models() / "train_timing.json");
  }
  if (choice == ModelChoice::kAll || choice == ModelChoice::kGp) {
    // Residual labels use the physical parameters that produced the data.
    const TrajectoryMetadata meta = ReadTrajectorySidecar(train_files.front());
    const GpTrainingSet set =
        SampleGpData(train, meta.quad, meta.drag, cfg.gp_points);
    const GpKernel kernel = SelectGpKernel(set.inputs, set.targets, cfg.gp);
    WriteJsonFile(ToJson(GpFit(set.inputs, set.targets, kernel)),
                  out.models() / "gp.json");
  }
  WriteJsonFile(Json{{"type", "nominal"}, {"quad", ToJson(cfg.quad)}},
                out.models() / "nominal.json");
  WriteManifest(out.models(), cfg, "train");
}

void CmdEvaluate(const RunConfig& cfg, ModelChoice choice) {
  const OutputLayout out{cfg.output_dir};
  const bool want_knode =
      choice == ModelChoice::kAll || choice == ModelChoice::kKnode;
  const bool want_gp = choice == ModelChoice::kAll || choice == ModelChoice::kGp;
  auto model_file = [&](const char* name) {
    const fs::path p = out.models() / name;
    if (!fs::exists(p)) {
      throw ConfigError("model file not found: " + p.string() +
                        " (run `train` first)");
    }
    return p;
  };
  const NominalModel nominal(cfg.quad);
  const PlantModel plant(cfg.quad, cfg.drag);
  std::optional<HybridDynamics> knode;
  std::optional<GpDynamics> gp;
  if (want_knode) {
    knode.emplace(HybridModelFromJson(ReadJsonFile(model_file("knode.json"))));
  }
  if (want_gp) {
    gp.emplace(cfg.quad, GpModelFromJson(ReadJsonFile(model_file("gp.json"))));
  }
  std::vector<NamedModel> models = {{"nominal", &nominal}};
  if (gp) models.push_back({"gp", &*gp});
  if (knode) models.push_back({"knode", &*knode});

  WriteRootRecord(cfg, "evaluate");
  fs::create_directories(out.eval());
  const fs::path traj_dir = out.eval() / "traj";
  const fs::path log_dir = out.eval() / "mpc";
  fs::create_directories(log_dir);
  if (cfg.dump_trajectories) fs::create_directories(traj_dir);
  const ExperimentSettings settings = Settings(cfg);

  const PredictionOutcome pred = PredictionExperiment(
      models, plant, nominal, cfg.prediction_specs, settings);
  WriteErrorTable(pred.rows, out.eval() / "prediction_errors.csv");
  WriteOneStepTable(pred.one_step, out.eval() / "prediction_onestep.csv");
  if (cfg.dump_trajectories) {
    for (const PredictionCase& c : pred.cases) {
      const std::string stem = "prediction_" + c.spec.Name() + "_";
      WriteTrajectoryCsv(c.truth, traj_dir / (stem + "truth.csv"));
      for (std::size_t i = 0; i < models.size(); ++i) {
        if (c.predictions[i].size() == 0) continue;
        WriteTrajectoryCsv(c.predictions[i],
                           traj_dir / (stem + models[i].name + ".csv"));
      }
    }
  }

  const TrackingOutcome track =
      TrackingExperiment(models, plant, cfg.tracking_specs, settings);
  WriteErrorTable(track.rows, out.eval() / "tracking_errors.csv");
  Json timing = Json::object();
  for (const TrackingCase& c : track.cases) {
    const std::string stem = "tracking_" + c.spec.Name() + "_";
    if (cfg.dump_trajectories) {
      WriteTrajectoryCsv(c.reference, traj_dir / (stem + "reference.csv"));
    }
    for (std::size_t i = 0; i < models.size(); ++i) {
      const ClosedLoopResult& f = c.flights[i];
      if (f.trajectory.size() == 0) continue;
      if (cfg.dump_trajectories) {
        WriteTrajectoryCsv(f.trajectory,
                           traj_dir / (stem + models[i].name + ".csv"));
      }
      WriteJsonFile(LogJson(f), log_dir / (stem + models[i].name + ".json"));
      std::vector<double> secs;
      for (const MpcStepLog& l : f.log) secs.push_back(l.solve_seconds);
      double worst = 0.0;
      for (double s : secs) worst = std::max(worst, s);
      timing[stem + models[i].name] = {{"mean_solve_seconds", Mean(secs)},
                                       {"max_solve_seconds", worst}};
    }
  }
  WriteJsonFile(timing, out.eval() / "mpc_timing.json");

  Json summary;
  summary["config_hash"] = cfg.Hash();
  summary["prediction"] = PredictionSummary(pred.rows, cfg.prediction_specs);
  if (knode && !cfg.tracking_specs.empty()) {
    summary["tracking"]["mean_reduction_knode_vs_nominal"] =
        MeanRelativeReduction(track.rows, "knode", "nominal");
  }
  if (cfg.tracking_sanity && !cfg.tracking_specs.empty()) {
    // Model-matched baseline: nominal MPC on a drag-free plant.
    const TrackingOutcome sanity = TrackingExperiment(
        {{"nominal_matched", &nominal}}, nominal, cfg.tracking_specs, settings);
    WriteErrorTable(sanity.rows, out.eval() / "tracking_sanity.csv");
  }
  WriteJsonFile(summary, out.eval() / "summary.json");
  WriteManifest(out.eval(), cfg, "evaluate");
}

void CmdRunAll(const RunConfig& cfg, ModelChoice choice) {
  CmdGenerate(cfg);
  CmdTrain(cfg, choice);
  CmdEvaluate(cfg, choice);
}

}  // namespace knode
