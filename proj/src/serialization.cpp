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

#include "knode/serialization.hpp"

#include <fstream>
#include <string>

namespace knode {
namespace {

template <int N>
Eigen::Matrix<double, N, 1> FixedVector(const Json& j, const char* what) {
  const Eigen::VectorXd v = VectorFromJson(j);
  if (v.size() != N) {
    throw DimensionError(std::string(what) + ": expected " +
                         std::to_string(N) + " values");
  }
  return v;
}

}  // namespace

void WriteJsonFile(const Json& j, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("file not found: " + path.string());
  try {
    return Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Eigen::VectorXd VectorFromJson(const Json& j) {
  if (!j.is_array()) throw DimensionError("expected a JSON array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json MatrixToJson(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(VectorToJson(m.row(i)));
  }
  return rows;
}

Eigen::MatrixXd MatrixFromJson(const Json& j) {
  if (!j.is_array()) throw DimensionError("expected an array of rows");
  if (j.empty()) return {};
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Eigen::VectorXd row = VectorFromJson(j[i]);
    if (row.size() != cols) throw DimensionError("ragged matrix rows");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

Json ToJson(const QuadParams& p) {
  Json j;
  j["mass"] = p.mass;
  j["inertia"] = VectorToJson(p.inertia);
  j["arm_length"] = p.arm_length;
  j["gamma"] = p.gamma;
  j["gravity"] = p.gravity;
  return j;
}

QuadParams QuadParamsFromJson(const Json& j) {
  QuadParams p;
  p.mass = j.at("mass").get<double>();
  p.inertia = FixedVector<3>(j.at("inertia"), "inertia");
  p.arm_length = j.at("arm_length").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.gravity = j.at("gravity").get<double>();
  p.Validate();
  return p;
}

Json ToJson(const DragParams& d) {
  Json j;
  j["linear"] = VectorToJson(d.linear);
  j["quadratic"] = VectorToJson(d.quadratic);
  return j;
}

DragParams DragParamsFromJson(const Json& j) {
  DragParams d;
  d.linear = FixedVector<3>(j.at("linear"), "drag.linear");
  d.quadratic = FixedVector<3>(j.at("quadratic"), "drag.quadratic");
  d.Validate();
  return d;
}

Json ToJson(const Mlp& net) {
  Json j;
  j["layer_sizes"] = net.layer_sizes();
  j["activation"] =
      net.hidden_activation() == Activation::kTanh ? "tanh" : "identity";
  j["params"] = VectorToJson(net.params());
  return j;
}

Mlp MlpFromJson(const Json& j) {
  const std::string act = j.value("activation", "tanh");
  if (act != "tanh" && act != "identity") {
    throw ConfigError("unknown activation '" + act + "'");
  }
  Mlp net(j.at("layer_sizes").get<std::vector<int>>(),
          act == "tanh" ? Activation::kTanh : Activation::kIdentity);
  net.set_params(VectorFromJson(j.at("params")));
  return net;
}

Json ToJson(const HybridModel& h) {
  Json j;
  j["type"] = "knode";
  j["quad"] = ToJson(h.params);
  j["mask"] = VectorToJson(h.mask);
  j["input_mean"] = VectorToJson(h.input_mean);
  j["input_scale"] = VectorToJson(h.input_scale);
  j["output_scale"] = VectorToJson(h.output_scale);
  j["net"] = ToJson(h.net);
  return j;
}

HybridModel HybridModelFromJson(const Json& j) {
  if (j.value("type", "") != "knode") {
    throw ConfigError("model file is not a knode model");
  }
  HybridModel h;
  h.params = QuadParamsFromJson(j.at("quad"));
  h.mask = FixedVector<kStateDim>(j.at("mask"), "mask");
  h.input_mean = FixedVector<kFeatureDim>(j.at("input_mean"), "input_mean");
  h.input_scale = FixedVector<kFeatureDim>(j.at("input_scale"), "input_scale");
  h.output_scale =
      FixedVector<kStateDim>(j.at("output_scale"), "output_scale");
  h.net = MlpFromJson(j.at("net"));
  h.Validate();
  return h;
}

Json ToJson(const GpModel& g) {
  Json j;
  j["type"] = "gp";
  j["kernel"] = {{"constant", g.kernel.constant},
                 {"length_scale", g.kernel.length_scale},
                 {"noise_std", g.kernel.noise_std}};
  j["inputs"] = MatrixToJson(g.inputs);
  j["targets"] = MatrixToJson(g.targets);
  return j;
}

GpModel GpModelFromJson(const Json& j) {
  if (j.value("type", "") != "gp") {
    throw ConfigError("model file is not a gp model");
  }
  const Json& k = j.at("kernel");
  const GpKernel kernel{k.at("constant").get<double>(),
                        k.at("length_scale").get<double>(),
                        k.at("noise_std").get<double>()};
  return GpFit(MatrixFromJson(j.at("inputs")), MatrixFromJson(j.at("targets")),
               kernel);
}

}  // namespace knode
