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
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace knode {
namespace {

const char* TypeName(const Json& j) {
  if (j.is_number()) return "number";
  return j.type_name();
}

bool SameKind(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

Json MergeAt(const Json& base, const Json& user, const std::string& path) {
  if (!SameKind(base, user)) {
    throw ConfigError("config key '" + path + "' expects a " +
                      TypeName(base) + ", got a " + TypeName(user));
  }
  if (!base.is_object()) return user;
  Json out = base;
  for (const auto& [key, value] : user.items()) {
    const std::string child = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key '" + child + "'");
    out[key] = MergeAt(base[key], value, child);
  }
  return out;
}

Json SpecJson(const char* kind, double radius, bool clockwise = false) {
  Json j;
  j["kind"] = kind;
  j["radius"] = radius;
  j["speed"] = 2.0;
  j["clockwise"] = clockwise;
  return j;
}

double Number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("config key '" + path + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("config key '" + path + "' must be finite");
  return v;
}

int Integer(const Json& j, const std::string& path) {
  const double v = Number(j, path);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ConfigError("config key '" + path + "' must be an integer");
  }
  return static_cast<int>(v);
}

Eigen::VectorXd Numbers(const Json& j, const std::string& path, int size) {
  if (!j.is_array() || static_cast<int>(j.size()) != size) {
    throw ConfigError("config key '" + path + "' must be an array of " +
                      std::to_string(size) + " numbers");
  }
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) {
    v(i) = Number(j[static_cast<std::size_t>(i)],
                  path + "[" + std::to_string(i) + "]");
  }
  return v;
}

RefSpec ParseSpec(const Json& j, const std::string& path, double altitude,
                  double ramp_time) {
  static const std::set<std::string> kKeys = {"kind", "radius", "speed",
                                              "period", "clockwise", "center"};
  if (!j.is_object()) throw ConfigError("'" + path + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) {
      throw ConfigError("unknown config key '" + path + "." + key + "'");
    }
  }
  RefSpec s;
  const std::string kind = j.value("kind", "");
  if (kind == "circle") {
    s.kind = CurveKind::kCircle;
  } else if (kind == "lemniscate") {
    s.kind = CurveKind::kLemniscate;
  } else {
    throw ConfigError("'" + path + ".kind' must be circle or lemniscate");
  }
  if (!j.contains("radius")) throw ConfigError("'" + path + ".radius' is required");
  s.radius = Number(j["radius"], path + ".radius");
  if (j.contains("speed") == j.contains("period")) {
    throw ConfigError("'" + path + "' needs exactly one of speed, period");
  }
  if (j.contains("period")) {
    s.period = Number(j["period"], path + ".period");
  } else {
    // Circle speed is exact; for the lemniscate it is the speed at the
    // crossing point, the fastest point of the curve.
    const double speed = Number(j["speed"], path + ".speed");
    if (!(speed > 0.0)) throw ConfigError("'" + path + ".speed' must be > 0");
    const double length_factor =
        s.kind == CurveKind::kCircle ? 1.0 : std::numbers::sqrt2;
    s.period = 2.0 * std::numbers::pi * length_factor * s.radius / speed;
  }
  if (j.contains("clockwise")) {
    if (!j["clockwise"].is_boolean()) {
      throw ConfigError("'" + path + ".clockwise' must be a boolean");
    }
    s.clockwise = j["clockwise"].get<bool>();
  }
  if (j.contains("center")) s.center = Numbers(j["center"], path + ".center", 2);
  s.altitude = altitude;
  s.ramp_time = ramp_time;
  if (!(s.radius > 0.0) || !(s.period > 0.0)) {
    throw ConfigError("'" + path + "' needs radius > 0 and period > 0");
  }
  return s;
}

std::vector<RefSpec> ParseSpecs(const Json& j, const std::string& path,
                                double altitude, double ramp_time,
                                bool allow_empty) {
  if (!j.is_array()) throw ConfigError("'" + path + "' must be an array");
  if (j.empty() && !allow_empty) {
    throw ConfigError("'" + path + "' must list at least one trajectory");
  }
  std::vector<RefSpec> specs;
  std::set<std::string> names;
  for (std::size_t i = 0; i < j.size(); ++i) {
    specs.push_back(ParseSpec(j[i], path + "[" + std::to_string(i) + "]",
                              altitude, ramp_time));
    if (!names.insert(specs.back().Name()).second) {
      throw ConfigError("'" + path + "' lists " + specs.back().Name() + " twice");
    }
  }
  return specs;
}

bool IsMultiple(double span, double step) {
  const double n = std::round(span / step);
  return n >= 1.0 && std::abs(n * step - span) < 1e-9;
}

}  // namespace

std::string Fnv1aHex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::Hash() const {
  Json doc = resolved;
  doc.erase("output_dir");
  return Fnv1aHex(doc.dump());
}

Json DefaultConfigJson() {
  Json j;
  j["seed"] = 0;
  j["output_dir"] = "out";
  j["quad"] = ToJson(QuadParams{});
  j["drag"] = ToJson(DragParams{});
  j["simulation"] = {{"duration", 8.0},
                     {"plant_dt", 0.002},
                     {"rtol", 1e-10},
                     {"atol", 1e-12},
                     {"divergence_bound", 1e6}};
  j["reference"] = {{"altitude", 1.0}, {"ramp_time", 2.0}};
  j["data"]["train"] = {SpecJson("circle", 3.0),
                        SpecJson("circle", 6.0, /*clockwise=*/true)};
  j["data"]["validation"] = {SpecJson("circle", 4.0)};
  j["knode"] = {{"hidden", {64, 16}},
                {"mask", "full"},
                {"scale_floor", VectorToJson(DefaultFeatureScaleFloor())}};
  const TrainConfig t;
  j["train"] = {{"epochs", t.epochs},
                {"learning_rate", t.learning_rate},
                {"beta1", t.beta1},
                {"beta2", t.beta2},
                {"epsilon", t.epsilon},
                {"batch", t.batch},
                {"stride", t.stride},
                {"loss_weights", VectorToJson(t.loss_weights)}};
  j["gp"] = {{"points", 80}, {"grid", 20}, {"noise_std", 1e-4}};
  const MpcConfig m = MpcConfig::Defaults(QuadParams{});
  j["mpc"] = {{"horizon", m.horizon},
              {"dt", m.dt},
              {"q", VectorToJson(m.q)},
              {"r", VectorToJson(m.r)},
              {"p", VectorToJson(m.p)},
              {"max_thrust_factor", 2.0},
              {"max_moment", 0.1},
              {"use_state_bounds", false},
              {"x_min", VectorToJson(StateVector::Constant(-1e3))},
              {"x_max", VectorToJson(StateVector::Constant(1e3))},
              {"rho", m.rho},
              {"sqp_iters", m.sqp_iters},
              {"kkt_tol", m.kkt_tol}};
  Json pred = Json::array();
  for (double r : {2.0, 3.0, 4.0, 6.0, 8.0}) pred.push_back(SpecJson("circle", r));
  for (double r : {2.0, 4.0, 6.0}) pred.push_back(SpecJson("lemniscate", r));
  Json track = Json::array();
  for (double r : {1.0, 2.0, 4.0, 8.0}) track.push_back(SpecJson("circle", r));
  j["evaluation"] = {{"prediction", pred},
                     {"tracking", track},
                     {"tracking_sanity", true},
                     {"dump_trajectories", true}};
  return j;
}

Json MergeConfig(const Json& base, const Json& user) {
  if (!user.is_object()) throw ConfigError("config document must be a JSON object");
  return MergeAt(base, user, "");
}

void ApplyOverride(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &doc;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    node = &(*node)[part];
  }
  *node = MergeAt(*node, value, key);
}

RunConfig ParseRunConfig(const Json& doc) {
  RunConfig c;
  c.resolved = doc;
  try {
    const double seed = Number(doc.at("seed"), "seed");
    if (seed < 0 || seed != std::floor(seed) || seed > 9.007199254740992e15) {
      throw ConfigError("'seed' must be a nonnegative integer");
    }
    c.seed = static_cast<std::uint64_t>(seed);
    if (!doc.at("output_dir").is_string() ||
        doc.at("output_dir").get<std::string>().empty()) {
      throw ConfigError("'output_dir' must be a nonempty string");
    }
    c.output_dir = doc.at("output_dir").get<std::string>();
    c.quad = QuadParamsFromJson(doc.at("quad"));
    c.drag = DragParamsFromJson(doc.at("drag"));

    const Json& sim = doc.at("simulation");
    c.duration = Number(sim.at("duration"), "simulation.duration");
    c.plant_dt = Number(sim.at("plant_dt"), "simulation.plant_dt");
    c.integrator.rtol = Number(sim.at("rtol"), "simulation.rtol");
    c.integrator.atol = Number(sim.at("atol"), "simulation.atol");
    c.integrator.divergence_bound =
        Number(sim.at("divergence_bound"), "simulation.divergence_bound");
    if (!(c.plant_dt > 0.0)) throw ConfigError("simulation.plant_dt must be > 0");
    if (!(c.duration > 0.0) || !IsMultiple(c.duration, c.plant_dt)) {
      throw ConfigError(
          "simulation.duration must be a positive multiple of plant_dt");
    }
    if (!(c.integrator.rtol > 0.0) || !(c.integrator.atol > 0.0) ||
        !(c.integrator.divergence_bound > 0.0)) {
      throw ConfigError("simulation tolerances and bound must be > 0");
    }

    const double altitude =
        Number(doc.at("reference").at("altitude"), "reference.altitude");
    const double ramp =
        Number(doc.at("reference").at("ramp_time"), "reference.ramp_time");
    if (!(ramp >= 0.0)) throw ConfigError("reference.ramp_time must be >= 0");
    c.train_specs = ParseSpecs(doc.at("data").at("train"), "data.train",
                               altitude, ramp, false);
    c.validation_specs = ParseSpecs(doc.at("data").at("validation"),
                                    "data.validation", altitude, ramp, true);
    c.prediction_specs = ParseSpecs(doc.at("evaluation").at("prediction"),
                                    "evaluation.prediction", altitude, ramp,
                                    true);
    c.tracking_specs = ParseSpecs(doc.at("evaluation").at("tracking"),
                                  "evaluation.tracking", altitude, ramp, true);

    const Json& kn = doc.at("knode");
    if (!kn.at("hidden").is_array()) throw ConfigError("knode.hidden must be an array");
    for (std::size_t i = 0; i < kn.at("hidden").size(); ++i) {
      const int w = Integer(kn["hidden"][i], "knode.hidden");
      if (w < 1) throw ConfigError("knode.hidden widths must be >= 1");
      c.hidden.push_back(w);
    }
    const std::string mask = kn.at("mask").is_string()
                                 ? kn.at("mask").get<std::string>()
                                 : std::string();
    if (mask == "full") {
      c.mask = FullMask();
    } else if (mask == "velocity") {
      c.mask = VelocityMask();
    } else {
      throw ConfigError("knode.mask must be 'full' or 'velocity'");
    }
    c.scale_floor = Numbers(kn.at("scale_floor"), "knode.scale_floor", kFeatureDim);
    if ((c.scale_floor.array() < 0.0).any()) {
      throw ConfigError("knode.scale_floor entries must be >= 0");
    }

    const Json& tr = doc.at("train");
    c.train.epochs = Integer(tr.at("epochs"), "train.epochs");
    c.train.learning_rate = Number(tr.at("learning_rate"), "train.learning_rate");
    c.train.beta1 = Number(tr.at("beta1"), "train.beta1");
    c.train.beta2 = Number(tr.at("beta2"), "train.beta2");
    c.train.epsilon = Number(tr.at("epsilon"), "train.epsilon");
    c.train.batch = Integer(tr.at("batch"), "train.batch");
    c.train.stride = Integer(tr.at("stride"), "train.stride");
    c.train.loss_weights =
        Numbers(tr.at("loss_weights"), "train.loss_weights", kStateDim);
    c.train.seed = c.seed;
    c.train.Validate();

    const Json& gp = doc.at("gp");
    c.gp_points = Integer(gp.at("points"), "gp.points");
    c.gp.grid = Integer(gp.at("grid"), "gp.grid");
    c.gp.noise_std = Number(gp.at("noise_std"), "gp.noise_std");
    if (c.gp_points < 1 || c.gp.grid < 2 || !(c.gp.noise_std > 0.0)) {
      throw ConfigError("gp needs points >= 1, grid >= 2, noise_std > 0");
    }

    const Json& m = doc.at("mpc");
    c.mpc = MpcConfig::Defaults(c.quad);
    c.mpc.horizon = Integer(m.at("horizon"), "mpc.horizon");
    c.mpc.dt = Number(m.at("dt"), "mpc.dt");
    c.mpc.q = Numbers(m.at("q"), "mpc.q", kStateDim);
    c.mpc.r = Numbers(m.at("r"), "mpc.r", kInputDim);
    c.mpc.p = Numbers(m.at("p"), "mpc.p", kStateDim);
    const double thrust = Number(m.at("max_thrust_factor"), "mpc.max_thrust_factor");
    const double moment = Number(m.at("max_moment"), "mpc.max_moment");
    if (!(thrust > 0.0) || !(moment >= 0.0)) {
      throw ConfigError("mpc.max_thrust_factor must be > 0, max_moment >= 0");
    }
    c.mpc.u_min << 0.0, -moment, -moment, -moment;
    c.mpc.u_max << thrust * c.quad.HoverThrust(), moment, moment, moment;
    if (!m.at("use_state_bounds").is_boolean()) {
      throw ConfigError("mpc.use_state_bounds must be a boolean");
    }
    c.mpc.use_state_bounds = m.at("use_state_bounds").get<bool>();
    c.mpc.x_min = Numbers(m.at("x_min"), "mpc.x_min", kStateDim);
    c.mpc.x_max = Numbers(m.at("x_max"), "mpc.x_max", kStateDim);
    c.mpc.rho = Number(m.at("rho"), "mpc.rho");
    c.mpc.sqp_iters = Integer(m.at("sqp_iters"), "mpc.sqp_iters");
    c.mpc.kkt_tol = Number(m.at("kkt_tol"), "mpc.kkt_tol");
    c.mpc.Validate();
    if (!IsMultiple(c.mpc.dt, c.plant_dt)) {
      throw ConfigError("mpc.dt must be a multiple of simulation.plant_dt");
    }
    if (!IsMultiple(c.duration, c.mpc.dt)) {
      throw ConfigError("simulation.duration must be a multiple of mpc.dt");
    }

    const Json& ev = doc.at("evaluation");
    if (!ev.at("tracking_sanity").is_boolean() ||
        !ev.at("dump_trajectories").is_boolean()) {
      throw ConfigError("evaluation flags must be booleans");
    }
    c.tracking_sanity = ev["tracking_sanity"].get<bool>();
    c.dump_trajectories = ev["dump_trajectories"].get<bool>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig LoadRunConfig(const std::optional<std::filesystem::path>& path,
                        const std::vector<std::string>& overrides,
                        std::optional<std::uint64_t> seed,
                        std::optional<std::filesystem::path> output_dir) {
  Json doc = DefaultConfigJson();
  if (path) doc = MergeConfig(doc, ReadJsonFile(*path));
  for (const std::string& o : overrides) ApplyOverride(doc, o);
  if (seed) doc["seed"] = *seed;
  if (output_dir) doc["output_dir"] = output_dir->string();
  return ParseRunConfig(doc);
}

}  // namespace knode
