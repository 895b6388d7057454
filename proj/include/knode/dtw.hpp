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

#ifndef KNODE_DTW_HPP_
#define KNODE_DTW_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "knode/types.hpp"

namespace knode {

struct DtwResult {
  double distance = 0.0;  // sum of local costs along the path
  std::vector<std::pair<std::size_t, std::size_t>> path;
  // distance divided by the number of aligned pairs.
  double Normalized() const {
    return path.empty() ? 0.0 : distance / static_cast<double>(path.size());
  }
};

// Dynamic time warping with Euclidean local cost and no window constraint.
// Ties prefer the diagonal step, then advancing the first sequence. Throws
// std::invalid_argument on empty input or mismatched point dimensions.
DtwResult DtwDistance(const std::vector<Eigen::VectorXd>& a,
                      const std::vector<Eigen::VectorXd>& b);
DtwResult DtwDistance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

}  // namespace knode

#endif  // KNODE_DTW_HPP_
