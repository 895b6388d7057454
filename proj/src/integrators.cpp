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

#include "knode/integrators.hpp"

#include <cmath>
#include <stdexcept>

namespace knode {

StateVector Rk4Step(const DerivativeFn& f, const StateVector& x,
                    const InputVector& u, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("Rk4Step: h must be positive");
  const StateVector next =
      Rk4Step([&](const StateVector& s) { return f(s, u); }, x, h);
  if (!next.allFinite()) throw DivergenceError("Rk4Step: non-finite result");
  return next;
}

Trajectory Rk45Simulate(const DerivativeFn& f, const StateVector& x0,
                        const InputSchedule& schedule, double t_span,
                        double dt, const Rk45Options& opt) {
  if (!(dt > 0.0) || !(t_span > 0.0)) {
    throw std::invalid_argument("Rk45Simulate: dt and t_span must be positive");
  }
  const double ratio = t_span / dt;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (steps == 0 || std::abs(static_cast<double>(steps) * dt - t_span) > 1e-9) {
    throw std::invalid_argument(
        "Rk45Simulate: t_span must be a positive multiple of dt");
  }
  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.inputs.reserve(steps + 1);

  StateVector x = x0;
  InputVector u = InputVector::Zero();
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    u = schedule(i, t, x);
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.inputs.push_back(u);
    x = Rk45Advance([&](const StateVector& s) { return f(s, u); }, x, dt, opt);
  }
  traj.times.push_back(static_cast<double>(steps) * dt);
  traj.states.push_back(x);
  traj.inputs.push_back(u);
  return traj;
}

Trajectory Rk45Replay(const DerivativeFn& f, const StateVector& x0,
                      const std::vector<InputVector>& inputs, double dt,
                      const Rk45Options& opt) {
  return Rk45Simulate(
      f, x0,
      [&](std::size_t i, double, const StateVector&) { return inputs.at(i); },
      static_cast<double>(inputs.size()) * dt, dt, opt);
}

}  // namespace knode
