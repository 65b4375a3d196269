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

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cfris/config.hpp"

namespace cfris {

/// sinc(x) = sin(pi x) / (pi x), sinc(0) = 1.
double sinc(double x);

/// Spatial correlation of a planar surface with an isotropic sinc kernel.
/// Element x (1-based) sits at (mod(x-1, rows) * width, floor((x-1)/divisor) * height)
/// where divisor is `cols` under GridIndexing::kVerbatim and `rows` otherwise.
Eigen::MatrixXd build_correlation_matrix(int rows, int cols, double width, double height, double wavelength,
                                         GridIndexing indexing = GridIndexing::kVerbatim);

/// 1e-3 * d^-exponent with d clamped to at least 1 m.
double large_scale_gain(double distance_m, double exponent);

/// One drop of the network: geometry, large-scale gains and the surface
/// correlation. Immutable once built.
struct NetworkRealization {
  std::vector<Eigen::Vector2d> ap_positions;
  std::vector<Eigen::Vector2d> user_positions;
  Eigen::Vector2d ris_position;

  Eigen::MatrixXd direct_gain;   // beta, M x K
  Eigen::VectorXd ap_ris_gain;   // alpha, M
  Eigen::VectorXd ris_user_gain;  // alpha_bar, K

  double element_area = 0.0;     // d_H * d_V
  Eigen::MatrixXd correlation;   // R, unit diagonal
  Eigen::MatrixXd correlation_sq;  // R * R
  /// F with F F^T equal to R after clipping negative eigenvalues.
  Eigen::MatrixXd correlation_factor;
  double min_eigenvalue = 0.0;

  int num_aps() const { return static_cast<int>(ap_positions.size()); }
  int num_users() const { return static_cast<int>(user_positions.size()); }
  int num_elements() const { return static_cast<int>(correlation.rows()); }

  /// R_m = alpha_m * d_H d_V * R.
  Eigen::MatrixXd ap_covariance(int m) const { return ap_ris_gain(m) * element_area * correlation; }
  /// R_bar_k = alpha_bar_k * d_H d_V * R.
  Eigen::MatrixXd user_covariance(int k) const { return ris_user_gain(k) * element_area * correlation; }
};

/// Builds the realization from explicit positions. Used by sample_layout and
/// by tests that need hand-placed nodes.
NetworkRealization make_realization(const Scenario& s, std::vector<Eigen::Vector2d> aps,
                                    std::vector<Eigen::Vector2d> users, Eigen::Vector2d ris);

/// APs equispaced on the horizontal diameter, surface at its left endpoint,
/// users uniform in the disc.
NetworkRealization sample_layout(const Scenario& s, std::uint64_t seed);

/// Eigenvalue-clipped square-root factor of a symmetric matrix.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& sym, double* min_eigenvalue = nullptr);

}  // namespace cfris
