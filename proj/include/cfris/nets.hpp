// Copyright 2026 The cfris Authors
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

#pragma once

#include <Eigen/Dense>

#include "cfris/rng.hpp"

namespace cfris {

/// Dense net input -> hidden -> hidden -> output with rectifier hidden
/// activations and a linear head. All parameters live in one flat vector:
/// [W1 (col-major), b1, W2, b2, W3, b3].
class Mlp {
 public:
  Mlp() = default;
  Mlp(int inputs, int hidden, int outputs);

  struct Cache {
    Eigen::VectorXd input, hidden1, hidden2;
  };

  int inputs() const { return inputs_; }
  int hidden() const { return hidden_; }
  int outputs() const { return outputs_; }
  Eigen::Index num_params() const { return params_.size(); }

  const Eigen::VectorXd& params() const { return params_; }
  Eigen::VectorXd& params() { return params_; }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  void initialize(RandomStream& rng);

  Eigen::VectorXd forward(const Eigen::VectorXd& x, Cache* cache = nullptr) const;

  /// Adds dL/dparams to `grad` for upstream dL/dy and returns dL/dx.
  Eigen::VectorXd backward(const Cache& cache, const Eigen::VectorXd& dy, Eigen::VectorXd& grad) const;

 private:
  int inputs_ = 0, hidden_ = 0, outputs_ = 0;
  Eigen::VectorXd params_;
};

/// Plain gradient step or Adam, selected at construction.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(Eigen::Index size, double lr, bool adam);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

 private:
  double lr_ = 0.0;
  bool adam_ = false;
  long long t_ = 0;
  Eigen::VectorXd m_, v_;
};

/// target <- tau * online + (1 - tau) * target.
void polyak_update(Eigen::VectorXd& target, const Eigen::VectorXd& online, double tau);

}  // namespace cfris
