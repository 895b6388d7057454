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

#include "knode/reference.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace knode {
namespace {

constexpr double kGridTol = 1e-9;

std::size_t GridSteps(double duration, double dt) {
  if (!(dt > 0.0) || !(duration >= 0.0)) {
    throw std::invalid_argument("reference: dt must be > 0, duration >= 0");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  if (std::abs(static_cast<double>(n) * dt - duration) > kGridTol) {
    throw std::invalid_argument("reference: duration is not a multiple of dt");
  }
  return n;
}

}  // namespace

void RefSpec::Validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("RefSpec: radius must be > 0");
  if (!(period > 0.0)) throw std::invalid_argument("RefSpec: period must be > 0");
  if (!(ramp_time >= 0.0)) {
    throw std::invalid_argument("RefSpec: ramp_time must be >= 0");
  }
}

std::string RefSpec::Name() const {
  std::ostringstream os;
  os << (kind == CurveKind::kCircle ? "circle" : "lemniscate") << "_r"
     << radius;
  if (clockwise) os << "_cw";
  return os.str();
}

RefPoint EvaluateCurve(const RefSpec& spec, double t) {
  const double w =
      (spec.clockwise ? -2.0 : 2.0) * std::numbers::pi / spec.period;
  const double c = std::cos(w * t), s = std::sin(w * t);
  const double r = spec.radius;
  RefPoint p;
  if (spec.kind == CurveKind::kCircle) {
    p.position = {spec.center.x() + r * c, spec.center.y() + r * s,
                  spec.altitude};
    p.velocity = {-r * w * s, r * w * c, 0.0};
  } else {
    p.position = {spec.center.x() + r * c, spec.center.y() + r * s * c,
                  spec.altitude};
    p.velocity = {-r * w * s, r * w * (c * c - s * s), 0.0};
  }
  return p;
}

RefPoint EvaluateReference(const RefSpec& spec, double t) {
  const RefPoint curve = EvaluateCurve(spec, t);
  if (spec.ramp_time <= 0.0 || t >= spec.ramp_time) return curve;
  const Vec3 start = EvaluateCurve(spec, 0.0).position;
  const double tau = std::max(t, 0.0) / spec.ramp_time;
  const double blend = tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau);
  const double blend_rate = 30.0 * tau * tau * (1.0 - tau) * (1.0 - tau) /
                            spec.ramp_time;
  const Vec3 gap = curve.position - start;
  return {start + blend * gap, blend_rate * gap + blend * curve.velocity};
}

StateVector Reference::At(double t) const {
  if (states.empty()) throw std::out_of_range("reference is empty");
  const double pos = t / dt;
  const double last = static_cast<double>(states.size() - 1);
  if (pos < -kGridTol || pos > last + 1e-6) {
    throw std::out_of_range("reference queried outside its time span");
  }
  const double clamped = std::clamp(pos, 0.0, last);
  const auto i = static_cast<std::size_t>(std::floor(clamped + 1e-9));
  if (i + 1 >= states.size()) return states.back();
  const double frac = std::max(clamped - static_cast<double>(i), 0.0);
  if (frac < 1e-9) return states[i];
  return (1.0 - frac) * states[i] + frac * states[i + 1];
}

std::vector<StateVector> Reference::Window(double t, int count,
                                           double step) const {
  std::vector<StateVector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(At(t + i * step));
  return out;
}

Reference Reference::Constant(const StateVector& state, double duration,
                              double dt) {
  Reference ref;
  ref.dt = dt;
  ref.states.assign(GridSteps(duration, dt) + 1, state);
  return ref;
}

Reference GenerateReference(const RefSpec& spec, double duration, double dt) {
  spec.Validate();
  const std::size_t n = GridSteps(duration, dt);
  Reference ref;
  ref.dt = dt;
  ref.states.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const RefPoint p = EvaluateReference(spec, static_cast<double>(i) * dt);
    StateVector x = StateVector::Zero();
    x.segment<3>(idx::kPos) = p.position;
    x.segment<3>(idx::kVel) = p.velocity;
    ref.states.push_back(x);
  }
  return ref;
}

}  // namespace knode
