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

#include "knode/mpc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace knode {
namespace {

using InputSquare = Eigen::Matrix<double, kInputDim, kInputDim>;
using GainMatrix = Eigen::Matrix<double, kInputDim, kStateDim>;

InputVector Clamp(const InputVector& u, const MpcConfig& cfg) {
  return u.cwiseMax(cfg.u_min).cwiseMin(cfg.u_max);
}

// Quadratic state cost with optional soft box; returns value and fills the
// Gauss-Newton gradient and Hessian diagonal.
// Minimizes 0.5 k'Hk + g'k over lower <= k <= upper by projected Newton,
// starting from zero. On return `free` marks the components off their
// bounds at the solution and `llt` holds the factor of H restricted to them
// (embedded in a 4x4 matrix with identity on clamped rows).
struct BoxQpResult {
  InputVector k = InputVector::Zero();
  Eigen::Matrix<bool, kInputDim, 1> free;
  Eigen::LLT<InputSquare> llt;
};

bool FactorFree(const InputSquare& h,
                const Eigen::Matrix<bool, kInputDim, 1>& free,
                Eigen::LLT<InputSquare>* llt) {
  InputSquare hf = InputSquare::Identity();
  for (int i = 0; i < kInputDim; ++i) {
    for (int j = 0; j < kInputDim; ++j) {
      if (free(i) && free(j)) hf(i, j) = h(i, j);
    }
  }
  llt->compute(hf);
  return llt->info() == Eigen::Success;
}

BoxQpResult SolveBoxQp(const InputSquare& h, const InputVector& g,
                       const InputVector& lower, const InputVector& upper) {
  auto objective = [&](const InputVector& k) {
    return 0.5 * k.dot(h * k) + g.dot(k);
  };
  BoxQpResult r;
  r.k = InputVector::Zero().cwiseMax(lower).cwiseMin(upper);
  r.free.setConstant(true);
  for (int iter = 0; iter < 50; ++iter) {
    const InputVector grad = g + h * r.k;
    for (int i = 0; i < kInputDim; ++i) {
      const bool at_lower = r.k(i) <= lower(i) && grad(i) > 0.0;
      const bool at_upper = r.k(i) >= upper(i) && grad(i) < 0.0;
      r.free(i) = !(at_lower || at_upper);
    }
    if (!FactorFree(h, r.free, &r.llt)) {
      throw NumericalError("MPC: input Hessian not positive definite");
    }
    if (!r.free.any()) break;
    InputVector grad_free = grad;
    for (int i = 0; i < kInputDim; ++i) {
      if (!r.free(i)) grad_free(i) = 0.0;
    }
    if (grad_free.cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + g.cwiseAbs().maxCoeff())) {
      break;
    }
    const InputVector step = -r.llt.solve(grad_free);
    const double f0 = objective(r.k);
    bool moved = false;
    for (double alpha = 1.0; alpha > 1e-10; alpha *= 0.5) {
      const InputVector trial =
          (r.k + alpha * step).cwiseMax(lower).cwiseMin(upper);
      if (objective(trial) <= f0 + 0.1 * grad.dot(trial - r.k)) {
        moved = !(trial == r.k);
        r.k = trial;
        break;
      }
    }
    if (!moved) break;
  }
  return r;
}

double StateCost(const StateVector& x, const StateVector& xr,
                 const StateVector& w, const MpcConfig& cfg,
                 StateVector* grad, StateVector* hess) {
  const StateVector e = StateDifference(x, xr);
  double cost = e.dot(w.cwiseProduct(e));
  if (grad) *grad = 2.0 * w.cwiseProduct(e);
  if (hess) *hess = 2.0 * w;
  if (cfg.use_state_bounds) {
    for (int i = 0; i < kStateDim; ++i) {
      double viol = 0.0;
      if (x(i) > cfg.x_max(i)) viol = x(i) - cfg.x_max(i);
      if (x(i) < cfg.x_min(i)) viol = x(i) - cfg.x_min(i);
      if (viol != 0.0) {
        cost += cfg.rho * viol * viol;
        if (grad) (*grad)(i) += 2.0 * cfg.rho * viol;
        if (hess) (*hess)(i) += 2.0 * cfg.rho;
      }
    }
  }
  return cost;
}

double InputCost(const InputVector& u, const MpcConfig& cfg) {
  const InputVector d = u - cfg.u_ref;
  return d.dot(cfg.r.cwiseProduct(d));
}

double Rollout(const DiscreteModel& model, const StateVector& x0,
               const std::vector<StateVector>& ref,
               const std::vector<InputVector>& u, const MpcConfig& cfg,
               std::vector<StateVector>* xs) {
  const int n = static_cast<int>(u.size());
  xs->resize(static_cast<std::size_t>(n) + 1);
  (*xs)[0] = x0;
  double cost = 0.0;
  for (int i = 0; i < n; ++i) {
    cost += StateCost((*xs)[i], ref[i], cfg.q, cfg, nullptr, nullptr) +
            InputCost(u[i], cfg);
    (*xs)[i + 1] = model.Step((*xs)[i], u[i]);
    if (!(*xs)[i + 1].allFinite()) {
      throw DivergenceError("MPC rollout produced a non-finite state");
    }
  }
  cost += StateCost((*xs)[n], ref[n], cfg.p, cfg, nullptr, nullptr);
  return cost;
}

}  // namespace

Rk4Discretization::Rk4Discretization(const ContinuousModel& model, double dt)
    : model_(model), dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("discretization dt must be > 0");
}

StateVector Rk4Discretization::Step(const StateVector& x,
                                    const InputVector& u) const {
  const StateVector k1 = model_.Derivative(x, u);
  const StateVector k2 = model_.Derivative(x + 0.5 * dt_ * k1, u);
  const StateVector k3 = model_.Derivative(x + 0.5 * dt_ * k2, u);
  const StateVector k4 = model_.Derivative(x + dt_ * k3, u);
  return x + (dt_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void Rk4Discretization::Linearize(const StateVector& x, const InputVector& u,
                                  StateMatrix* a, InputMatrix* b) const {
  const double h = dt_;
  const StateMatrix eye = StateMatrix::Identity();
  StateMatrix ja;
  InputMatrix jb;

  const StateVector k1 = model_.Derivative(x, u);
  model_.Jacobian(x, u, &ja, &jb);
  const StateMatrix k1x = ja;
  const InputMatrix k1u = jb;

  const StateVector s2 = x + 0.5 * h * k1;
  const StateVector k2 = model_.Derivative(s2, u);
  model_.Jacobian(s2, u, &ja, &jb);
  const StateMatrix k2x = ja * (eye + 0.5 * h * k1x);
  const InputMatrix k2u = ja * (0.5 * h * k1u) + jb;

  const StateVector s3 = x + 0.5 * h * k2;
  const StateVector k3 = model_.Derivative(s3, u);
  model_.Jacobian(s3, u, &ja, &jb);
  const StateMatrix k3x = ja * (eye + 0.5 * h * k2x);
  const InputMatrix k3u = ja * (0.5 * h * k2u) + jb;

  const StateVector s4 = x + h * k3;
  model_.Jacobian(s4, u, &ja, &jb);
  const StateMatrix k4x = ja * (eye + h * k3x);
  const InputMatrix k4u = ja * (h * k3u) + jb;

  *a = eye + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  *b = (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
}

MpcConfig MpcConfig::Defaults(const QuadParams& params) {
  MpcConfig cfg;
  cfg.q << 100, 100, 100, 10, 10, 10, 10, 10, 10, 1, 1, 1;
  cfg.r << 0.1, 1, 1, 1;
  cfg.p = cfg.q;
  cfg.u_ref = params.HoverInput();
  cfg.u_min << 0.0, -0.1, -0.1, -0.1;
  cfg.u_max << 2.0 * params.HoverThrust(), 0.1, 0.1, 0.1;
  return cfg;
}

void MpcConfig::Validate() const {
  if (horizon < 1) throw ConfigError("mpc.horizon must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("mpc.dt must be > 0");
  if ((q.array() < 0.0).any() || (p.array() < 0.0).any()) {
    throw ConfigError("mpc Q and P must be nonnegative");
  }
  if (!(r.array() > 0.0).all()) throw ConfigError("mpc R must be positive");
  if ((u_min.array() > u_max.array()).any()) {
    throw ConfigError("mpc input bounds are infeasible (u_min > u_max)");
  }
  if (use_state_bounds && (x_min.array() > x_max.array()).any()) {
    throw ConfigError("mpc state bounds are infeasible (x_min > x_max)");
  }
  if (!(rho >= 0.0)) throw ConfigError("mpc.rho must be >= 0");
  if (sqp_iters < 1) throw ConfigError("mpc.sqp_iters must be >= 1");
  if (!(kkt_tol > 0.0)) throw ConfigError("mpc.kkt_tol must be > 0");
}

double MpcCost(const DiscreteModel& model, const StateVector& x0,
               const std::vector<StateVector>& ref,
               const std::vector<InputVector>& u_seq, const MpcConfig& cfg,
               std::vector<StateVector>* x_seq) {
  std::vector<StateVector> xs;
  const double cost = Rollout(model, x0, ref, u_seq, cfg, &xs);
  if (x_seq) *x_seq = std::move(xs);
  return cost;
}

MpcSolution SolveMpc(const DiscreteModel& model, const StateVector& x0,
                     const std::vector<StateVector>& ref, const MpcConfig& cfg,
                     const std::optional<std::vector<InputVector>>& warm_start) {
  cfg.Validate();
  const int n = cfg.horizon;
  if (static_cast<int>(ref.size()) < n + 1) {
    throw std::invalid_argument("MPC reference shorter than horizon + 1");
  }
  if (!x0.allFinite()) throw std::invalid_argument("MPC: non-finite x0");

  MpcSolution sol;
  if (warm_start && static_cast<int>(warm_start->size()) == n) {
    sol.u_seq = *warm_start;
    for (auto& u : sol.u_seq) u = Clamp(u, cfg);
  } else {
    sol.u_seq.assign(static_cast<std::size_t>(n), Clamp(cfg.u_ref, cfg));
  }
  sol.cost = Rollout(model, x0, ref, sol.u_seq, cfg, &sol.x_seq);
  sol.cost_history.push_back(sol.cost);

  std::vector<StateMatrix> as(n);
  std::vector<InputMatrix> bs(n);
  std::vector<InputVector> ks(n);
  std::vector<GainMatrix> gains(n);
  std::vector<StateVector> trial_x;
  std::vector<InputVector> trial_u(n);

  for (int iter = 0;; ++iter) {
    // Linearize and take the single-shooting gradient by an adjoint sweep.
    for (int i = 0; i < n; ++i) {
      model.Linearize(sol.x_seq[i], sol.u_seq[i], &as[i], &bs[i]);
    }
    StateVector lam;
    StateCost(sol.x_seq[n], ref[n], cfg.p, cfg, &lam, nullptr);
    double kkt = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      const InputVector g =
          2.0 * cfg.r.cwiseProduct(sol.u_seq[i] - cfg.u_ref) +
          bs[i].transpose() * lam;
      const InputVector projected =
          sol.u_seq[i] - Clamp(sol.u_seq[i] - g, cfg);
      kkt = std::max(kkt, projected.cwiseAbs().maxCoeff());
      StateVector lx;
      StateCost(sol.x_seq[i], ref[i], cfg.q, cfg, &lx, nullptr);
      lam = lx + as[i].transpose() * lam;
    }
    sol.kkt_residual = kkt;
    if (kkt < cfg.kkt_tol) {
      sol.converged = true;
      break;
    }
    if (iter >= cfg.sqp_iters) break;
    sol.iterations = iter + 1;

    // Riccati recursion for the Gauss-Newton subproblem.
    StateVector vx, vdiag;
    StateCost(sol.x_seq[n], ref[n], cfg.p, cfg, &vx, &vdiag);
    StateMatrix vxx = vdiag.asDiagonal();
    double slope = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      StateVector lx, ldiag;
      StateCost(sol.x_seq[i], ref[i], cfg.q, cfg, &lx, &ldiag);
      const InputVector lu =
          2.0 * cfg.r.cwiseProduct(sol.u_seq[i] - cfg.u_ref);
      const StateMatrix& a = as[i];
      const InputMatrix& b = bs[i];
      const Eigen::Matrix<double, kInputDim, kStateDim> btv =
          b.transpose() * vxx;
      const StateVector qx = lx + a.transpose() * vx;
      const InputVector qu = lu + b.transpose() * vx;
      StateMatrix qxx = a.transpose() * vxx * a;
      qxx.diagonal() += ldiag;
      InputSquare quu = btv * b;
      quu.diagonal() += 2.0 * cfg.r;
      const GainMatrix qux = btv * a;
      // Feedforward from the box-constrained subproblem; inputs pinned at a
      // bound get no feedback so the remaining stages do not count on them.
      const BoxQpResult box = SolveBoxQp(quu, qu, cfg.u_min - sol.u_seq[i],
                                         cfg.u_max - sol.u_seq[i]);
      ks[i] = box.k;
      gains[i] = -box.llt.solve(qux);
      for (int j = 0; j < kInputDim; ++j) {
        if (!box.free(j)) gains[i].row(j).setZero();
      }
      slope += ks[i].dot(qu);
      vx = qx + gains[i].transpose() * (quu * ks[i] + qu) +
           qux.transpose() * ks[i];
      vxx = qxx + gains[i].transpose() * quu * gains[i] +
            gains[i].transpose() * qux + qux.transpose() * gains[i];
      vxx = 0.5 * (vxx + vxx.transpose()).eval();
    }
    if (!(slope < 0.0)) break;

    // Backtracking line search on the true cost.
    bool accepted = false;
    for (double alpha = 1.0; alpha > 1e-4; alpha *= 0.5) {
      trial_x.assign(static_cast<std::size_t>(n) + 1, x0);
      double cost = 0.0;
      bool finite = true;
      for (int i = 0; i < n; ++i) {
        trial_u[i] = Clamp(sol.u_seq[i] + alpha * ks[i] +
                               gains[i] * StateDifference(trial_x[i],
                                                          sol.x_seq[i]),
                           cfg);
        cost += StateCost(trial_x[i], ref[i], cfg.q, cfg, nullptr, nullptr) +
                InputCost(trial_u[i], cfg);
        try {
          trial_x[i + 1] = model.Step(trial_x[i], trial_u[i]);
        } catch (const GimbalLockError&) {
          finite = false;
          break;
        }
        if (!trial_x[i + 1].allFinite()) {
          finite = false;
          break;
        }
      }
      if (!finite) continue;
      cost += StateCost(trial_x[n], ref[n], cfg.p, cfg, nullptr, nullptr);
      if (cost <= sol.cost + 1e-4 * alpha * slope) {
        sol.u_seq = trial_u;
        sol.x_seq = trial_x;
        sol.cost = cost;
        sol.cost_history.push_back(cost);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return sol;
}

MpcSolution SolveMpc(const DiscreteModel& model, const StateVector& x0,
                     const Reference& ref, double t, const MpcConfig& cfg,
                     const std::optional<std::vector<InputVector>>& warm_start) {
  return SolveMpc(model, x0, ref.Window(t, cfg.horizon + 1, cfg.dt), cfg,
                  warm_start);
}

std::vector<InputVector> ShiftInputs(const std::vector<InputVector>& u_seq) {
  if (u_seq.empty()) return {};
  std::vector<InputVector> out(u_seq.begin() + 1, u_seq.end());
  out.push_back(u_seq.back());
  return out;
}

}  // namespace knode
