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

#include "knode/closed_loop.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace knode {

ClosedLoopResult ClosedLoopSimulate(const ContinuousModel& controller,
                                    const ContinuousModel& plant,
                                    const Reference& ref, double duration,
                                    const MpcConfig& cfg,
                                    const ClosedLoopOptions& opt,
                                    std::optional<StateVector> x0) {
  cfg.Validate();
  if (!(opt.plant_dt > 0.0) || !(duration > 0.0)) {
    throw std::invalid_argument("closed loop: plant_dt and duration must be > 0");
  }
  const long hold = std::lround(cfg.dt / opt.plant_dt);
  if (hold < 1 ||
      std::abs(static_cast<double>(hold) * opt.plant_dt - cfg.dt) > 1e-12) {
    throw std::invalid_argument(
        "closed loop: control dt must be a multiple of plant_dt");
  }
  const double needed = duration + cfg.horizon * cfg.dt;
  if (ref.duration() < needed - 1e-9) {
    throw std::invalid_argument(
        "closed loop: reference shorter than duration plus one horizon");
  }

  const Rk4Discretization model(controller, cfg.dt);
  ClosedLoopResult result;
  std::optional<std::vector<InputVector>> warm;
  InputVector u = cfg.u_ref;
  const InputSchedule schedule = [&](std::size_t step, double,
                                     const StateVector& x) {
    if (step % static_cast<std::size_t>(hold) != 0) return u;
    const double t = static_cast<double>(step) * opt.plant_dt;
    const auto start = std::chrono::steady_clock::now();
    const MpcSolution sol = SolveMpc(model, x, ref, t, cfg, warm);
    const auto stop = std::chrono::steady_clock::now();
    result.log.push_back(
        {t, sol.cost, sol.iterations, sol.kkt_residual, sol.converged,
         std::chrono::duration<double>(stop - start).count()});
    warm = ShiftInputs(sol.u_seq);
    u = sol.u_seq.front();
    return u;
  };
  result.trajectory =
      Rk45Simulate(plant.AsFunction(), x0.value_or(ref.At(0.0)), schedule,
                   duration, opt.plant_dt, opt.integrator);
  return result;
}

}  // namespace knode
