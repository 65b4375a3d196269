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

#include "cfris/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cfris/rng.hpp"
#include "cfris/streams.hpp"

namespace cfris {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

Eigen::MatrixXd build_correlation_matrix(int rows, int cols, double width, double height, double wavelength,
                                         GridIndexing indexing) {
  const int n = rows * cols;
  const int divisor = indexing == GridIndexing::kVerbatim ? cols : rows;
  Eigen::MatrixXd pos(n, 2);
  for (int x = 0; x < n; ++x) {
    pos(x, 0) = static_cast<double>(x % rows) * width;
    pos(x, 1) = static_cast<double>(x / divisor) * height;
  }
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double dist = (pos.row(i) - pos.row(j)).norm();
      r(i, j) = r(j, i) = sinc(2.0 * dist / wavelength);
    }
  }
  return r;
}

double large_scale_gain(double distance_m, double exponent) {
  return 1e-3 * std::pow(std::max(distance_m, 1.0), -exponent);
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& sym, double* min_eigenvalue) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd w = eig.eigenvalues();
  if (min_eigenvalue) *min_eigenvalue = w.size() ? w.minCoeff() : 0.0;
  return eig.eigenvectors() * w.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

NetworkRealization make_realization(const Scenario& s, std::vector<Eigen::Vector2d> aps,
                                    std::vector<Eigen::Vector2d> users, Eigen::Vector2d ris) {
  NetworkRealization net;
  net.ap_positions = std::move(aps);
  net.user_positions = std::move(users);
  net.ris_position = ris;
  const int m_count = net.num_aps();
  const int k_count = net.num_users();

  net.direct_gain.resize(m_count, k_count);
  net.ap_ris_gain.resize(m_count);
  net.ris_user_gain.resize(k_count);
  for (int m = 0; m < m_count; ++m) {
    net.ap_ris_gain(m) = large_scale_gain((net.ap_positions[m] - ris).norm(), s.ap_ris_exponent);
    for (int k = 0; k < k_count; ++k) {
      net.direct_gain(m, k) =
          large_scale_gain((net.ap_positions[m] - net.user_positions[k]).norm(), s.direct_exponent);
    }
  }
  for (int k = 0; k < k_count; ++k) {
    net.ris_user_gain(k) = large_scale_gain((net.user_positions[k] - ris).norm(), s.ris_user_exponent);
  }

  net.element_area = s.element_area();
  net.correlation = build_correlation_matrix(s.ris_rows, s.ris_cols, s.width(), s.height(), s.wavelength(),
                                             s.grid_indexing);
  net.correlation_sq = net.correlation * net.correlation;
  net.correlation_factor = psd_factor(net.correlation, &net.min_eigenvalue);
  return net;
}

NetworkRealization sample_layout(const Scenario& s, std::uint64_t seed) {
  RandomStream rng(seed, streams::kLayout);
  const double r = s.radius;
  std::vector<Eigen::Vector2d> aps;
  for (int i = 0; i < s.num_aps; ++i) {
    aps.emplace_back(-r + 2.0 * r * (i + 1) / (s.num_aps + 1), 0.0);
  }
  std::vector<Eigen::Vector2d> users;
  for (int k = 0; k < s.num_users; ++k) {
    const double rad = r * std::sqrt(rng.uniform());
    const double ang = 2.0 * std::numbers::pi * rng.uniform();
    users.emplace_back(rad * std::cos(ang), rad * std::sin(ang));
  }
  return make_realization(s, std::move(aps), std::move(users), Eigen::Vector2d(-r, 0.0));
}

}  // namespace cfris
