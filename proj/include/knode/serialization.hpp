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

#ifndef KNODE_SERIALIZATION_HPP_
#define KNODE_SERIALIZATION_HPP_

#include <filesystem>

#include "json.hpp"

#include "knode/dynamics.hpp"
#include "knode/gp.hpp"
#include "knode/hybrid.hpp"
#include "knode/mlp.hpp"

namespace knode {

using Json = nlohmann::ordered_json;

// Pretty-printed with a trailing newline. Doubles are written in their
// shortest round-trip form.
void WriteJsonFile(const Json& j, const std::filesystem::path& path);
Json ReadJsonFile(const std::filesystem::path& path);

Json ToJson(const QuadParams& p);
QuadParams QuadParamsFromJson(const Json& j);
Json ToJson(const DragParams& d);
DragParams DragParamsFromJson(const Json& j);

Json ToJson(const Mlp& net);
Mlp MlpFromJson(const Json& j);

Json ToJson(const HybridModel& h);
HybridModel HybridModelFromJson(const Json& j);

Json ToJson(const GpModel& g);
// Refactorizes from the stored training arrays and kernel.
GpModel GpModelFromJson(const Json& j);

template <class Derived>
Json VectorToJson(const Eigen::MatrixBase<Derived>& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd VectorFromJson(const Json& j);
Json MatrixToJson(const Eigen::MatrixXd& m);  // array of rows
Eigen::MatrixXd MatrixFromJson(const Json& j);

}  // namespace knode

#endif  // KNODE_SERIALIZATION_HPP_
