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

#ifndef KNODE_CLOSED_LOOP_HPP_
#define KNODE_CLOSED_LOOP_HPP_

#include <optional>
#include <vector>

#include "knode/integrators.hpp"
#include "knode/models.hpp"
#include "knode/mpc.hpp"
#include "knode/reference.hpp"
#include "knode/trajectory.hpp"

namespace knode {

// One receding-horizon solve.
struct MpcStepLog {
  double t = 0.0;
  double cost = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
  double solve_seconds = 0.0;  // wall clock; not reproducible
};

struct ClosedLoopResult {
  Trajectory trajectory;  // plant samples every plant_dt
  std::vector<MpcStepLog> log;
};

struct ClosedLoopOptions {
  double plant_dt = 0.002;
  Rk45Options integrator;
};

// Receding-horizon loop with perfect state feedback: every cfg.dt the
// controller model is solved from the plant state and its first input is
// held while the plant is integrated with RK45 on the plant_dt grid. The
// reference must extend a full horizon past `duration`. The plant starts at
// x0, or at the reference start when x0 is empty.
ClosedLoopResult ClosedLoopSimulate(const ContinuousModel& controller,
                                    const ContinuousModel& plant,
                                    const Reference& ref, double duration,
                                    const MpcConfig& cfg,
                                    const ClosedLoopOptions& opt = {},
                                    std::optional<StateVector> x0 = {});

}  // namespace knode

#endif  // KNODE_CLOSED_LOOP_HPP_
