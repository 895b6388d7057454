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

#ifndef KNODE_INTEGRATORS_HPP_
#define KNODE_INTEGRATORS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>

#include "knode/trajectory.hpp"
#include "knode/types.hpp"

namespace knode {

using DerivativeFn =
    std::function<StateVector(const StateVector&, const InputVector&)>;

template <class Vec>
void RequireFinite(const Vec& x, double bound, const char* where) {
  if (!x.allFinite() || x.cwiseAbs().maxCoeff() > bound) {
    throw DivergenceError(std::string(where) + ": state diverged");
  }
}

// Classical fourth-order Runge-Kutta step of an autonomous system.
template <class Vec, class Fn>
Vec Rk4Step(Fn&& f, const Vec& x, double h) {
  const Vec k1 = f(x);
  const Vec k2 = f(Vec(x + 0.5 * h * k1));
  const Vec k3 = f(Vec(x + 0.5 * h * k2));
  const Vec k4 = f(Vec(x + h * k3));
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// RK4 with the input held constant over the step.
StateVector Rk4Step(const DerivativeFn& f, const StateVector& x,
                    const InputVector& u, double h);

struct Rk45Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double divergence_bound = 1e6;
  int max_substeps = 100000;
};

// Dormand-Prince 5(4) with error control, integrating exactly over [0, span].
template <class Vec, class Fn>
Vec Rk45Advance(Fn&& f, const Vec& x0, double span,
                const Rk45Options& opt = {}) {
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                   e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                   e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

  Vec x = x0;
  double t = 0.0;
  double h = span;
  Vec k1 = f(x);
  for (int n = 0; t < span; ++n) {
    if (n >= opt.max_substeps) {
      throw DivergenceError("Rk45Advance: step size collapsed");
    }
    const bool last = t + h >= span * (1.0 - 1e-14);
    if (last) h = span - t;
    const Vec k2 = f(Vec(x + h * a21 * k1));
    const Vec k3 = f(Vec(x + h * (a31 * k1 + a32 * k2)));
    const Vec k4 = f(Vec(x + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Vec k5 =
        f(Vec(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Vec k6 = f(
        Vec(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const Vec xn =
        x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = f(xn);
    const Vec err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Vec scale =
        (opt.atol + opt.rtol * x.cwiseAbs().cwiseMax(xn.cwiseAbs()).array())
            .matrix();
    const double err_norm = err.cwiseQuotient(scale).cwiseAbs().maxCoeff();
    if (!std::isfinite(err_norm)) {
      throw DivergenceError("Rk45Advance: non-finite error estimate");
    }
    if (err_norm <= 1.0) {
      t = last ? span : t + h;
      x = xn;
      k1 = k7;
      RequireFinite(x, opt.divergence_bound, "Rk45Advance");
    }
    const double factor =
        err_norm == 0.0 ? 5.0
                        : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
    h *= factor;
  }
  return x;
}

// Input applied over the interval starting at sample `step` (time t, state x).
using InputSchedule =
    std::function<InputVector(std::size_t step, double t, const StateVector& x)>;

// Integrates the plant on a fixed output grid with spacing dt. t_span must be
// a positive multiple of dt. Inputs are held constant between samples.
Trajectory Rk45Simulate(const DerivativeFn& f, const StateVector& x0,
                        const InputSchedule& schedule, double t_span,
                        double dt, const Rk45Options& opt = {});

// Open-loop replay of a recorded input sequence (one input per interval).
Trajectory Rk45Replay(const DerivativeFn& f, const StateVector& x0,
                      const std::vector<InputVector>& inputs, double dt,
                      const Rk45Options& opt = {});

}  // namespace knode

#endif  // KNODE_INTEGRATORS_HPP_
