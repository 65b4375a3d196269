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

#include "cfris/nets.hpp"

#include <cmath>
#include <stdexcept>

namespace cfris {

namespace {

struct Views {
  Eigen::Map<const Eigen::MatrixXd> w1;
  Eigen::Map<const Eigen::VectorXd> b1;
  Eigen::Map<const Eigen::MatrixXd> w2;
  Eigen::Map<const Eigen::VectorXd> b2;
  Eigen::Map<const Eigen::MatrixXd> w3;
  Eigen::Map<const Eigen::VectorXd> b3;
};

Views views(const double* p, int in, int h, int out) {
  const double* w1 = p;
  const double* b1 = w1 + h * in;
  const double* w2 = b1 + h;
  const double* b2 = w2 + h * h;
  const double* w3 = b2 + h;
  const double* b3 = w3 + out * h;
  return {Eigen::Map<const Eigen::MatrixXd>(w1, h, in), Eigen::Map<const Eigen::VectorXd>(b1, h),
          Eigen::Map<const Eigen::MatrixXd>(w2, h, h),  Eigen::Map<const Eigen::VectorXd>(b2, h),
          Eigen::Map<const Eigen::MatrixXd>(w3, out, h), Eigen::Map<const Eigen::VectorXd>(b3, out)};
}

}  // namespace

Mlp::Mlp(int inputs, int hidden, int outputs)
    : inputs_(inputs),
      hidden_(hidden),
      outputs_(outputs),
      params_(Eigen::VectorXd::Zero(hidden * inputs + hidden + hidden * hidden + hidden + outputs * hidden + outputs)) {
  if (inputs < 1 || hidden < 1 || outputs < 1) throw std::invalid_argument("Mlp: sizes must be positive");
}

void Mlp::initialize(RandomStream& rng) {
  Eigen::Index at = 0;
  auto fill = [&](Eigen::Index count, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < count; ++i) params_(at++) = bound * (2.0 * rng.uniform() - 1.0);
  };
  fill(hidden_ * inputs_ + hidden_, inputs_);
  fill(hidden_ * hidden_ + hidden_, hidden_);
  fill(outputs_ * hidden_ + outputs_, hidden_);
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x, Cache* cache) const {
  const Views v = views(params_.data(), inputs_, hidden_, outputs_);
  Eigen::VectorXd h1 = (v.w1 * x + v.b1).cwiseMax(0.0);
  Eigen::VectorXd h2 = (v.w2 * h1 + v.b2).cwiseMax(0.0);
  Eigen::VectorXd y = v.w3 * h2 + v.b3;
  if (cache) {
    cache->input = x;
    cache->hidden1 = std::move(h1);
    cache->hidden2 = std::move(h2);
  }
  return y;
}

Eigen::VectorXd Mlp::backward(const Cache& c, const Eigen::VectorXd& dy, Eigen::VectorXd& grad) const {
  const Views v = views(params_.data(), inputs_, hidden_, outputs_);
  const int in = inputs_, h = hidden_, out = outputs_;
  double* g = grad.data();
  Eigen::Map<Eigen::MatrixXd> gw1(g, h, in);
  Eigen::Map<Eigen::VectorXd> gb1(g + h * in, h);
  Eigen::Map<Eigen::MatrixXd> gw2(g + h * in + h, h, h);
  Eigen::Map<Eigen::VectorXd> gb2(g + h * in + h + h * h, h);
  Eigen::Map<Eigen::MatrixXd> gw3(g + h * in + 2 * h + h * h, out, h);
  Eigen::Map<Eigen::VectorXd> gb3(g + h * in + 2 * h + h * h + out * h, out);

  gw3.noalias() += dy * c.hidden2.transpose();
  gb3 += dy;
  Eigen::VectorXd d2 = v.w3.transpose() * dy;
  for (int i = 0; i < h; ++i) {
    if (c.hidden2(i) <= 0.0) d2(i) = 0.0;
  }
  gw2.noalias() += d2 * c.hidden1.transpose();
  gb2 += d2;
  Eigen::VectorXd d1 = v.w2.transpose() * d2;
  for (int i = 0; i < h; ++i) {
    if (c.hidden1(i) <= 0.0) d1(i) = 0.0;
  }
  gw1.noalias() += d1 * c.input.transpose();
  gb1 += d1;
  return v.w1.transpose() * d1;
}

Optimizer::Optimizer(Eigen::Index size, double lr, bool adam)
    : lr_(lr), adam_(adam), m_(Eigen::VectorXd::Zero(adam ? size : 0)), v_(Eigen::VectorXd::Zero(adam ? size : 0)) {}

void Optimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (!adam_) {
    params -= lr_ * grad;
    return;
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++t_;
  m_ = b1 * m_ + (1.0 - b1) * grad;
  v_ = b2 * v_ + (1.0 - b2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps);
}

void polyak_update(Eigen::VectorXd& target, const Eigen::VectorXd& online, double tau) {
  target = tau * online + (1.0 - tau) * target;
}

}  // namespace cfris
