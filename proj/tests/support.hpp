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

// Shared fixtures and independent reference computations for the tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

#include "cfris/channel.hpp"
#include "cfris/config.hpp"
#include "cfris/ris.hpp"
#include "cfris/rng.hpp"
#include "cfris/scenario.hpp"

namespace cfris::testing {

/// Surface-dominated instance: large elements and a long wavelength so the
/// cascaded path carries most of the power and phases matter.
inline nlohmann::json small_instance_json() {
  return nlohmann::json::parse(R"({
    "M": 2, "K": 3, "N_H": 2, "N_V": 2, "tau_p": 2,
    "radius": 30, "d_H": 4.0, "d_V": 4.0, "lambda": 32.0,
    "rho_dbm": 0, "rho_u_dbm": 0, "sigma2_dbm": -70, "sigma2_bar_dbm": -70,
    "beta_exp": 6, "alpha1_exp": 2, "alpha2_exp": 2})");
}

inline Scenario small_instance() { return scenario_from_json(small_instance_json()); }

inline Eigen::VectorXd draw_phases(int n, std::uint64_t seed, std::uint64_t tag = 99) {
  RandomStream rng(seed, tag);
  Eigen::VectorXd ph(n);
  for (int i = 0; i < n; ++i) ph(i) = 2.0 * std::numbers::pi * rng.uniform();
  return ph;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Dense-matrix reference for the second-order quantities, built only from
/// the covariance matrices and the reflection matrix.
struct DenseReference {
  const NetworkRealization& net;
  Eigen::MatrixXcd theta;

  DenseReference(const NetworkRealization& n, const RisState& ris) : net(n), theta(ris.matrix()) {}

  Eigen::MatrixXcd rm(int m) const { return net.ap_covariance(m).cast<std::complex<double>>(); }
  Eigen::MatrixXcd rbar(int k) const { return net.user_covariance(k).cast<std::complex<double>>(); }
  Eigen::MatrixXcd xi(int m, int k) const { return theta * rbar(k) * theta.adjoint() * rm(m); }
  Eigen::MatrixXcd b(int m) const { return theta.adjoint() * rm(m) * theta; }

  double kappa(int m, int k) const { return net.direct_gain(m, k) + xi(m, k).trace().real(); }
  double xi_pair(int m, int j, int m2, int i) const { return (xi(m, j) * xi(m2, i)).trace().real(); }
  double cascade(int m, int j, int m2) const {
    return (b(m) * rbar(j) * b(m2) * net.correlation.cast<std::complex<double>>()).trace().real();
  }
  double cascade_open(int m, int j, int m2) const { return (b(m) * rbar(j) * b(m2)).trace().real(); }
  double noise_cascade(int m, int m2) const {
    return (b(m) * b(m2) * net.correlation.cast<std::complex<double>>()).trace().real();
  }
  double noise_cascade_open(int m, int m2) const { return (b(m) * b(m2)).trace().real(); }
};

/// Central finite-difference gradient of f at x.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                        double step = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double orig = x(i);
    const double h = step * std::max(1.0, std::abs(orig));
    x(i) = orig + h;
    const double up = f(x);
    x(i) = orig - h;
    const double down = f(x);
    x(i) = orig;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

/// Largest componentwise relative error; components where both sides are
/// below `floor` in magnitude compare absolutely.
inline double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric,
                                 double floor = 1e-8) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double scale = std::max({std::abs(analytic(i)), std::abs(numeric(i)), floor});
    worst = std::max(worst, std::abs(analytic(i) - numeric(i)) / scale);
  }
  return worst;
}

}  // namespace cfris::testing
