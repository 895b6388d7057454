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

#include "knode/mlp.hpp"

#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "knode/types.hpp"

namespace knode {

Mlp::Mlp(std::vector<int> layer_sizes, Activation hidden)
    : sizes_(std::move(layer_sizes)), hidden_(hidden) {
  if (sizes_.size() < 2) {
    throw DimensionError("Mlp needs at least input and output layers");
  }
  for (int s : sizes_) {
    if (s <= 0) throw DimensionError("Mlp layer sizes must be positive");
  }
  Layout();
}

void Mlp::Layout() {
  offsets_.assign(1, 0);
  for (int l = 0; l < num_layers(); ++l) {
    const Eigen::Index n =
        static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
    offsets_.push_back(offsets_.back() + n);
  }
  params_ = Eigen::VectorXd::Zero(offsets_.back());
}

Mlp Mlp::Initialized(std::vector<int> layer_sizes, std::uint64_t seed,
                     Activation hidden) {
  Mlp net(std::move(layer_sizes), hidden);
  std::mt19937_64 rng(seed);
  // 53-bit uniform in [0,1) without relying on distribution internals.
  auto uniform = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  for (int l = 0; l + 1 < net.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.sizes_[l]));
    auto w = net.mutable_weight(l);
    auto b = net.mutable_bias(l);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        w(i, j) = bound * (2.0 * uniform() - 1.0);
      }
    }
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      b(i) = bound * (2.0 * uniform() - 1.0);
    }
  }
  return net;
}

void Mlp::set_params(const Eigen::VectorXd& p) {
  if (p.size() != params_.size()) {
    throw DimensionError("Mlp::set_params: expected " +
                         std::to_string(params_.size()) + " values, got " +
                         std::to_string(p.size()));
  }
  params_ = p;
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int layer) const {
  return {params_.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int layer) const {
  const Eigen::Index rows = sizes_[layer + 1];
  return {params_.data() + offsets_[layer] + rows * sizes_[layer], rows};
}

Eigen::Map<Eigen::MatrixXd> Mlp::mutable_weight(int layer) {
  return {params_.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<Eigen::VectorXd> Mlp::mutable_bias(int layer) {
  const Eigen::Index rows = sizes_[layer + 1];
  return {params_.data() + offsets_[layer] + rows * sizes_[layer], rows};
}

void Mlp::CheckInput(Eigen::Index rows) const {
  if (sizes_.empty() || rows != input_dim()) {
    throw DimensionError("Mlp: input has " + std::to_string(rows) +
                         " rows, network expects " +
                         std::to_string(sizes_.empty() ? 0 : input_dim()));
  }
}

Eigen::VectorXd Mlp::Forward(const Eigen::VectorXd& z) const {
  return ForwardBatch(z);
}

Eigen::MatrixXd Mlp::ForwardBatch(const Eigen::MatrixXd& z,
                                  Cache* cache) const {
  CheckInput(z.rows());
  if (cache) {
    cache->activations.resize(sizes_.size());
    cache->activations[0] = z;
  }
  Eigen::MatrixXd a = z;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd next = weight(l) * a;
    next.colwise() += bias(l);
    if (l + 1 < num_layers() && hidden_ == Activation::kTanh) {
      next = next.array().tanh().matrix();
    }
    a = std::move(next);
    if (cache) cache->activations[l + 1] = a;
  }
  return a;
}

void Mlp::BackwardBatch(const Cache& cache, const Eigen::MatrixXd& upstream,
                        Eigen::VectorXd* param_grad,
                        Eigen::MatrixXd* input_grad) const {
  if (upstream.rows() != output_dim()) {
    throw DimensionError("Mlp::BackwardBatch: upstream has wrong row count");
  }
  if (param_grad && param_grad->size() != params_.size()) {
    param_grad->setZero(params_.size());
  }
  Eigen::MatrixXd g = upstream;
  for (int l = num_layers() - 1; l >= 0; --l) {
    const Eigen::MatrixXd& a_in = cache.activations[l];
    if (param_grad) {
      const Eigen::Index rows = sizes_[l + 1];
      Eigen::Map<Eigen::MatrixXd> gw(param_grad->data() + offsets_[l], rows,
                                     sizes_[l]);
      Eigen::Map<Eigen::VectorXd> gb(
          param_grad->data() + offsets_[l] + rows * sizes_[l], rows);
      gw.noalias() += g * a_in.transpose();
      gb += g.rowwise().sum();
    }
    if (l == 0 && !input_grad) break;
    Eigen::MatrixXd prev = weight(l).transpose() * g;
    if (l > 0 && hidden_ == Activation::kTanh) {
      prev.array() *= 1.0 - a_in.array().square();
    }
    g = std::move(prev);
  }
  if (input_grad) *input_grad = std::move(g);
}

Eigen::MatrixXd Mlp::InputJacobian(const Eigen::VectorXd& z) const {
  Cache cache;
  ForwardBatch(z, &cache);
  // Forward-mode product of layer Jacobians, input side first.
  Eigen::MatrixXd jac = weight(0);
  for (int l = 1; l < num_layers(); ++l) {
    if (hidden_ == Activation::kTanh) {
      const Eigen::ArrayXd d = 1.0 - cache.activations[l].array().square();
      jac = d.matrix().asDiagonal() * jac;
    }
    jac = weight(l) * jac;
  }
  return jac;
}

MlpGradients ComputeMlpGradients(const Mlp& net, const Eigen::VectorXd& z,
                                 const Eigen::VectorXd& upstream) {
  Mlp::Cache cache;
  net.ForwardBatch(z, &cache);
  MlpGradients out;
  out.params = Eigen::VectorXd::Zero(net.num_params());
  Eigen::MatrixXd input_grad;
  net.BackwardBatch(cache, upstream, &out.params, &input_grad);
  out.input = input_grad.col(0);
  return out;
}

}  // namespace knode
