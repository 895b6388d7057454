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

#ifndef KNODE_GP_HPP_
#define KNODE_GP_HPP_

#include <Eigen/Core>

#include "knode/types.hpp"

namespace knode {

// k(a, b) = constant * exp(-|a - b|^2 / (2 length_scale^2)), with
// noise_std^2 added to the diagonal of the Gram matrix.
struct GpKernel {
  double constant = 1.0;
  double length_scale = 1.0;
  double noise_std = 1e-4;

  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
};

// Independent zero-mean GPs, one per output column, sharing one kernel.
struct GpModel {
  Eigen::MatrixXd inputs;   // M x D
  Eigen::MatrixXd targets;  // M x K
  GpKernel kernel;
  double jitter = 0.0;      // diagonal actually added (>= noise_std^2)
  Eigen::MatrixXd chol;     // lower factor of K + jitter I
  Eigen::MatrixXd alpha;    // (K + jitter I)^-1 targets, M x K

  Eigen::Index size() const { return inputs.rows(); }

  Eigen::VectorXd PredictMean(const Eigen::VectorXd& z) const;
  // d mean / d z (K x D).
  Eigen::MatrixXd PredictMeanJacobian(const Eigen::VectorXd& z) const;
};

Eigen::MatrixXd GramMatrix(const Eigen::MatrixXd& x, const GpKernel& kernel);

// Factorizes with the given hyperparameters. On Cholesky failure the diagonal
// jitter is doubled, up to six times, before throwing NumericalError. The
// training rows are stored in a canonical order, so the fit does not depend
// on the order of the input rows.
GpModel GpFit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
              const GpKernel& kernel);

// Sum over output columns of the log marginal likelihood; -inf when the
// Gram matrix cannot be factorized.
double GpLogMarginalLikelihood(const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& y,
                               const GpKernel& kernel);

struct GpSelectionOptions {
  int grid = 20;
  double noise_std = 1e-4;
};

// Chooses (constant, length_scale) by maximizing the log marginal likelihood
// over a log-spaced grid, then over a second grid spanning the neighbours of
// the best cell. Ranges are set from the target second moment and the median
// pairwise input distance.
GpKernel SelectGpKernel(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                        const GpSelectionOptions& opt = {});

}  // namespace knode

#endif  // KNODE_GP_HPP_
