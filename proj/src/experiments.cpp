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
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace knode {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ErrorRow Diverged(const std::string& spec, const std::string& model) {
  return {spec, model, kInf, kInf, kInf};
}

std::string Format(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<InputVector> IntervalInputs(const Trajectory& traj) {
  return {traj.inputs.begin(), traj.inputs.end() - 1};
}

OneStepRow ChainedOneStep(const std::string& spec, const NamedModel& model,
                          const Trajectory& truth, double dt) {
  const DerivativeFn f = model.model->AsFunction();
  double state_sq = 0.0, pos_sq = 0.0;
  const std::size_t n = truth.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const StateVector pred = Rk4Step(f, truth.states[i], truth.inputs[i], dt);
    const StateVector err = StateDifference(pred, truth.states[i + 1]);
    state_sq += err.squaredNorm();
    pos_sq += err.segment<3>(idx::kPos).squaredNorm();
  }
  const double count = static_cast<double>(n);
  return {spec, model.name, std::sqrt(state_sq / (count * kStateDim)),
          std::sqrt(pos_sq / count)};
}

}  // namespace

ErrorRow ScorePositions(const std::string& spec, const std::string& model,
                        const std::vector<Vec3>& truth,
                        const std::vector<Vec3>& other) {
  if (truth.size() != other.size() || truth.empty()) {
    throw std::invalid_argument("ScorePositions: length mismatch");
  }
  const DtwResult dtw = DtwDistance(truth, other);
  double sq = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    sq += (truth[i] - other[i]).squaredNorm();
  }
  return {spec, model, dtw.distance, dtw.Normalized(),
          std::sqrt(sq / static_cast<double>(truth.size()))};
}

Reference ExperimentReference(const RefSpec& spec,
                              const ExperimentSettings& settings) {
  const double span = settings.duration + settings.mpc.horizon * settings.mpc.dt;
  const double steps = std::round(span / settings.plant_dt);
  return GenerateReference(spec, steps * settings.plant_dt, settings.plant_dt);
}

PredictionOutcome PredictionExperiment(const std::vector<NamedModel>& models,
                                       const ContinuousModel& plant,
                                       const ContinuousModel& controller,
                                       const std::vector<RefSpec>& specs,
                                       const ExperimentSettings& settings) {
  PredictionOutcome out;
  const ClosedLoopOptions loop{settings.plant_dt, settings.integrator};
  for (const RefSpec& spec : specs) {
    const std::string name = spec.Name();
    PredictionCase c;
    c.spec = spec;
    c.truth = ClosedLoopSimulate(controller, plant,
                                 ExperimentReference(spec, settings),
                                 settings.duration, settings.mpc, loop)
                  .trajectory;
    const std::vector<Vec3> truth_pos = c.truth.Positions();
    for (const NamedModel& m : models) {
      try {
        Trajectory pred =
            Rk45Replay(m.model->AsFunction(), c.truth.states.front(),
                       IntervalInputs(c.truth), settings.plant_dt,
                       settings.integrator);
        out.rows.push_back(
            ScorePositions(name, m.name, truth_pos, pred.Positions()));
        c.predictions.push_back(std::move(pred));
      } catch (const NumericalError&) {
        out.rows.push_back(Diverged(name, m.name));
        c.predictions.emplace_back();
      }
      out.one_step.push_back(
          ChainedOneStep(name, m, c.truth, settings.plant_dt));
    }
    out.cases.push_back(std::move(c));
  }
  return out;
}

TrackingOutcome TrackingExperiment(const std::vector<NamedModel>& controllers,
                                   const ContinuousModel& plant,
                                   const std::vector<RefSpec>& specs,
                                   const ExperimentSettings& settings) {
  TrackingOutcome out;
  const ClosedLoopOptions loop{settings.plant_dt, settings.integrator};
  for (const RefSpec& spec : specs) {
    const std::string name = spec.Name();
    const Reference ref = ExperimentReference(spec, settings);
    TrackingCase c;
    c.spec = spec;
    const std::size_t samples =
        static_cast<std::size_t>(
            std::llround(settings.duration / settings.plant_dt)) +
        1;
    std::vector<Vec3> planned;
    for (std::size_t i = 0; i < samples; ++i) {
      const double t = static_cast<double>(i) * settings.plant_dt;
      c.reference.times.push_back(t);
      c.reference.states.push_back(ref.states[i]);
      c.reference.inputs.push_back(settings.mpc.u_ref);
      planned.push_back(ref.states[i].segment<3>(idx::kPos));
    }
    for (const NamedModel& m : controllers) {
      try {
        ClosedLoopResult flight = ClosedLoopSimulate(
            *m.model, plant, ref, settings.duration, settings.mpc, loop);
        out.rows.push_back(ScorePositions(name, m.name, planned,
                                          flight.trajectory.Positions()));
        c.flights.push_back(std::move(flight));
      } catch (const NumericalError&) {
        out.rows.push_back(Diverged(name, m.name));
        c.flights.emplace_back();
      }
    }
    out.cases.push_back(std::move(c));
  }
  return out;
}

void WriteErrorTable(const std::vector<ErrorRow>& rows,
                     const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "spec,model,dtw_raw,dtw_normalized,rmse\n";
  for (const ErrorRow& r : rows) {
    os << r.spec << ',' << r.model << ',' << Format(r.dtw_raw) << ','
       << Format(r.dtw_normalized) << ',' << Format(r.rmse) << '\n';
  }
}

std::vector<ErrorRow> ReadErrorTable(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  std::vector<ErrorRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    ErrorRow r;
    std::string field;
    std::getline(ss, r.spec, ',');
    std::getline(ss, r.model, ',');
    std::getline(ss, field, ',');
    r.dtw_raw = std::stod(field);
    std::getline(ss, field, ',');
    r.dtw_normalized = std::stod(field);
    std::getline(ss, field, ',');
    r.rmse = std::stod(field);
    rows.push_back(r);
  }
  return rows;
}

void WriteOneStepTable(const std::vector<OneStepRow>& rows,
                       const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "spec,model,state_rmse,position_rmse\n";
  for (const OneStepRow& r : rows) {
    os << r.spec << ',' << r.model << ',' << Format(r.state_rmse) << ','
       << Format(r.position_rmse) << '\n';
  }
}

double MeanRelativeReduction(const std::vector<ErrorRow>& rows,
                             const std::string& model,
                             const std::string& baseline) {
  std::map<std::string, double> base;
  for (const ErrorRow& r : rows) {
    if (r.model == baseline) base[r.spec] = r.dtw_raw;
  }
  double sum = 0.0;
  int count = 0;
  for (const ErrorRow& r : rows) {
    if (r.model != model) continue;
    const auto it = base.find(r.spec);
    if (it == base.end() || !(it->second > 0.0)) continue;
    sum += 1.0 - r.dtw_raw / it->second;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("no comparable rows");
  return sum / count;
}

}  // namespace knode
