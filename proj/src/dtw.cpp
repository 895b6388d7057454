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

#include "knode/dtw.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace knode {
namespace {

enum Step : std::uint8_t { kStart, kDiag, kUp, kLeft };

template <class Point>
DtwResult Dtw(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("DTW: sequences must be nonempty");
  }
  const std::size_t n = a.size(), m = b.size();
  for (const auto& p : a) {
    if (p.size() != b.front().size()) {
      throw std::invalid_argument("DTW: point dimensions differ");
    }
  }
  for (const auto& p : b) {
    if (p.size() != b.front().size()) {
      throw std::invalid_argument("DTW: point dimensions differ");
    }
  }

  // Two rolling cost rows plus the full step table for the traceback.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m, kInf), cur(m, kInf);
  std::vector<std::uint8_t> steps(n * m, kStart);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double local = (a[i] - b[j]).norm();
      if (i == 0 && j == 0) {
        cur[j] = local;
        continue;
      }
      double best = kInf;
      Step step = kStart;
      if (i > 0 && j > 0 && prev[j - 1] < best) {
        best = prev[j - 1];
        step = kDiag;
      }
      if (i > 0 && prev[j] < best) {
        best = prev[j];
        step = kUp;
      }
      if (j > 0 && cur[j - 1] < best) {
        best = cur[j - 1];
        step = kLeft;
      }
      cur[j] = best + local;
      steps[i * m + j] = step;
    }
    std::swap(prev, cur);
  }

  DtwResult result;
  result.distance = prev[m - 1];
  std::size_t i = n - 1, j = m - 1;
  result.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    switch (steps[i * m + j]) {
      case kDiag: --i; --j; break;
      case kUp: --i; break;
      case kLeft: --j; break;
      default: throw std::logic_error("DTW: broken traceback");
    }
    result.path.emplace_back(i, j);
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

}  // namespace

DtwResult DtwDistance(const std::vector<Eigen::VectorXd>& a,
                      const std::vector<Eigen::VectorXd>& b) {
  return Dtw(a, b);
}

DtwResult DtwDistance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  return Dtw(a, b);
}

}  // namespace knode
