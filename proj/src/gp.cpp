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

#include "knode/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>

namespace knode {
namespace {

// Rows of [x y] in lexicographic order. Factoring in this order makes the
// fit independent of how the caller ordered the training set, down to the
// last bit.
void CanonicalOrder(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                    Eigen::MatrixXd* xs, Eigen::MatrixXd* ys) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (x(a, c) != x(b, c)) return x(a, c) < x(b, c);
    }
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      if (y(a, c) != y(b, c)) return y(a, c) < y(b, c);
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), less);
  xs->resize(x.rows(), x.cols());
  ys->resize(y.rows(), y.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    xs->row(static_cast<Eigen::Index>(i)) = x.row(order[i]);
    ys->row(static_cast<Eigen::Index>(i)) = y.row(order[i]);
  }
}

bool TryFactor(const Eigen::MatrixXd& gram, double jitter,
               Eigen::MatrixXd* chol) {
  Eigen::MatrixXd k = gram;
  k.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return false;
  *chol = llt.matrixL();
  return chol->allFinite() && (chol->diagonal().array() > 0.0).all();
}

std::vector<double> LogSpace(double lo, double hi, int n) {
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) {
    out[i] = std::exp(n == 1 ? a : a + (b - a) * i / (n - 1));
  }
  return out;
}

}  // namespace

double GpKernel::operator()(const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b) const {
  return constant *
         std::exp(-(a - b).squaredNorm() / (2.0 * length_scale * length_scale));
}

Eigen::MatrixXd GramMatrix(const Eigen::MatrixXd& x, const GpKernel& kernel) {
  const Eigen::Index m = x.rows();
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    k(i, i) = kernel.constant;
    for (Eigen::Index j = 0; j < i; ++j) {
      k(i, j) = k(j, i) = kernel(x.row(i).transpose(), x.row(j).transpose());
    }
  }
  return k;
}

GpModel GpFit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
              const GpKernel& kernel) {
  if (x.rows() < 1) throw std::invalid_argument("GpFit: no training points");
  if (y.rows() != x.rows()) {
    throw DimensionError("GpFit: inputs and targets differ in row count");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw std::invalid_argument("GpFit: non-finite training data");
  }
  if (!(kernel.constant > 0.0) || !(kernel.length_scale > 0.0) ||
      !(kernel.noise_std >= 0.0)) {
    throw std::invalid_argument("GpFit: invalid kernel hyperparameters");
  }
  GpModel g;
  CanonicalOrder(x, y, &g.inputs, &g.targets);
  g.kernel = kernel;
  const Eigen::MatrixXd gram = GramMatrix(g.inputs, kernel);
  double jitter = kernel.noise_std * kernel.noise_std;
  bool ok = TryFactor(gram, jitter, &g.chol);
  for (int attempt = 0; !ok && attempt < 6; ++attempt) {
    jitter *= 2.0;
    ok = TryFactor(gram, jitter, &g.chol);
  }
  if (!ok) {
    throw NumericalError(
        "GpFit: Gram matrix not positive definite after jitter escalation "
        "(duplicate or ill-conditioned inputs?)");
  }
  g.jitter = jitter;
  const Eigen::MatrixXd w =
      g.chol.triangularView<Eigen::Lower>().solve(g.targets);
  g.alpha = g.chol.transpose().triangularView<Eigen::Upper>().solve(w);
  return g;
}

Eigen::VectorXd GpModel::PredictMean(const Eigen::VectorXd& z) const {
  Eigen::VectorXd k(size());
  for (Eigen::Index i = 0; i < size(); ++i) {
    k(i) = kernel(z, inputs.row(i).transpose());
  }
  return alpha.transpose() * k;
}

Eigen::MatrixXd GpModel::PredictMeanJacobian(const Eigen::VectorXd& z) const {
  const double inv_l2 = 1.0 / (kernel.length_scale * kernel.length_scale);
  Eigen::MatrixXd dk(size(), inputs.cols());
  for (Eigen::Index i = 0; i < size(); ++i) {
    const Eigen::VectorXd diff = z - inputs.row(i).transpose();
    dk.row(i) = (-kernel(z, inputs.row(i).transpose()) * inv_l2) *
                diff.transpose();
  }
  return alpha.transpose() * dk;
}

double GpLogMarginalLikelihood(const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& y,
                               const GpKernel& kernel) {
  Eigen::MatrixXd xs, ys;
  CanonicalOrder(x, y, &xs, &ys);
  Eigen::MatrixXd chol;
  if (!TryFactor(GramMatrix(xs, kernel), kernel.noise_std * kernel.noise_std,
                 &chol)) {
    return -std::numeric_limits<double>::infinity();
  }
  const Eigen::MatrixXd w = chol.triangularView<Eigen::Lower>().solve(ys);
  const double m = static_cast<double>(x.rows());
  const double k = static_cast<double>(y.cols());
  const double log_det = 2.0 * chol.diagonal().array().log().sum();
  return -0.5 * w.squaredNorm() - 0.5 * k * log_det -
         0.5 * k * m * std::log(2.0 * std::numbers::pi);
}

GpKernel SelectGpKernel(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                        const GpSelectionOptions& opt) {
  if (opt.grid < 2) throw std::invalid_argument("SelectGpKernel: grid < 2");
  std::vector<double> dists;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      dists.push_back((x.row(i) - x.row(j)).norm());
    }
  }
  double median = 1.0;
  if (!dists.empty()) {
    std::nth_element(dists.begin(), dists.begin() + dists.size() / 2,
                     dists.end());
    median = std::max(dists[dists.size() / 2], 1e-12);
  }
  const double second_moment =
      std::max(y.squaredNorm() / static_cast<double>(y.size()), 1e-12);

  auto search = [&](const std::vector<double>& cs,
                    const std::vector<double>& ls, int* bi, int* bj) {
    double best = -std::numeric_limits<double>::infinity();
    GpKernel best_kernel{cs[0], ls[0], opt.noise_std};
    for (int i = 0; i < static_cast<int>(cs.size()); ++i) {
      for (int j = 0; j < static_cast<int>(ls.size()); ++j) {
        const GpKernel k{cs[i], ls[j], opt.noise_std};
        const double lml = GpLogMarginalLikelihood(x, y, k);
        if (lml > best) {
          best = lml;
          best_kernel = k;
          *bi = i;
          *bj = j;
        }
      }
    }
    if (!std::isfinite(best)) {
      throw NumericalError("SelectGpKernel: no factorizable grid point");
    }
    return best_kernel;
  };

  const auto cs = LogSpace(1e-3 * second_moment, 1e3 * second_moment, opt.grid);
  const auto ls = LogSpace(1e-2 * median, 1e1 * median, opt.grid);
  int bi = 0, bj = 0;
  search(cs, ls, &bi, &bj);
  const auto lo = [](const std::vector<double>& v, int i) {
    return v[std::max(i - 1, 0)];
  };
  const auto hi = [](const std::vector<double>& v, int i) {
    return v[std::min<int>(i + 1, static_cast<int>(v.size()) - 1)];
  };
  int ri = 0, rj = 0;
  return search(LogSpace(lo(cs, bi), hi(cs, bi), opt.grid),
                LogSpace(lo(ls, bj), hi(ls, bj), opt.grid), &ri, &rj);
}

}  // namespace knode
