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

#ifndef KNODE_MLP_HPP_
#define KNODE_MLP_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace knode {

enum class Activation { kTanh, kIdentity };

// Fully connected network with a shared hidden activation and a linear output
// layer. Parameters live in one flat vector, layer by layer, each layer stored
// as its column-major weight matrix followed by its bias.
class Mlp {
 public:
  Mlp() = default;
  // All parameters zero.
  explicit Mlp(std::vector<int> layer_sizes,
               Activation hidden = Activation::kTanh);

  // Hidden layers uniform in +-1/sqrt(fan_in); the output layer starts at
  // zero so the network initially outputs exactly zero.
  static Mlp Initialized(std::vector<int> layer_sizes, std::uint64_t seed,
                         Activation hidden = Activation::kTanh);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  Activation hidden_activation() const { return hidden_; }
  Eigen::Index num_params() const { return params_.size(); }

  const Eigen::VectorXd& params() const { return params_; }
  void set_params(const Eigen::VectorXd& p);

  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  Eigen::Map<Eigen::MatrixXd> mutable_weight(int layer);
  Eigen::Map<Eigen::VectorXd> mutable_bias(int layer);

  // Post-activation values of every layer, input included, kept for the
  // backward pass.
  struct Cache {
    std::vector<Eigen::MatrixXd> activations;
  };

  Eigen::VectorXd Forward(const Eigen::VectorXd& z) const;

  // Column-wise forward pass over a batch (input_dim x S).
  Eigen::MatrixXd ForwardBatch(const Eigen::MatrixXd& z,
                               Cache* cache = nullptr) const;

  // Accumulates the gradient of sum_s upstream(:,s)^T out(:,s) with respect
  // to the parameters into `param_grad` and, if non-null, writes the input
  // gradient (input_dim x S).
  void BackwardBatch(const Cache& cache, const Eigen::MatrixXd& upstream,
                     Eigen::VectorXd* param_grad,
                     Eigen::MatrixXd* input_grad) const;

  // d out / d z at a single input (output_dim x input_dim).
  Eigen::MatrixXd InputJacobian(const Eigen::VectorXd& z) const;

 private:
  void Layout();
  void CheckInput(Eigen::Index rows) const;

  std::vector<int> sizes_;
  Activation hidden_ = Activation::kTanh;
  Eigen::VectorXd params_;
  std::vector<Eigen::Index> offsets_;
};

struct MlpGradients {
  Eigen::VectorXd params;
  Eigen::VectorXd input;
};

// Reverse-mode gradients of upstream^T net(z).
MlpGradients ComputeMlpGradients(const Mlp& net, const Eigen::VectorXd& z,
                                 const Eigen::VectorXd& upstream);

}  // namespace knode

#endif  // KNODE_MLP_HPP_
