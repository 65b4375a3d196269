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


#include <algorithm>
#include <cmath>
#include <numbers>

#include "cfris/scenario.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cfris;

TEST_SUITE("scenario") {
  TEST_CASE("sinc") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(std::abs(sinc(1.0)) < 1e-15);
    CHECK(sinc(0.5) == doctest::Approx(2.0 / std::numbers::pi));
  }

  TEST_CASE("correlation examples") {
    const double lambda = 0.2;
    // A 2 x 1 column only lies on a line when the floor division uses N_H.
    const auto row = GridIndexing::kRowMajor;
    const Eigen::MatrixXd half = build_correlation_matrix(2, 1, lambda / 2, lambda / 2, lambda, row);
    CHECK(half(0, 0) == 1.0);
    CHECK(std::abs(half(0, 1)) < 1e-15);
    const Eigen::MatrixXd quarter = build_correlation_matrix(2, 1, lambda / 4, lambda / 4, lambda, row);
    CHECK(quarter(0, 1) == doctest::Approx(0.636620).epsilon(1e-6));
    // Dividing by N_V = 1 moves the second element diagonally, (d, d) away.
    const Eigen::MatrixXd diag = build_correlation_matrix(2, 1, lambda / 2, lambda / 2, lambda);
    CHECK(diag(0, 1) == doctest::Approx(sinc(std::sqrt(2.0))).epsilon(1e-12));
  }

  TEST_CASE("verbatim indexing divides by the column count") {
    // 2 x 3 grid: element x sits at (x mod 2, floor(x / 3)), so elements 0
    // and 2 share a position and are fully correlated.
    const Eigen::MatrixXd r = build_correlation_matrix(2, 3, 0.05, 0.05, 0.2, GridIndexing::kVerbatim);
    CHECK(r(0, 2) == 1.0);
    const Eigen::MatrixXd rm = build_correlation_matrix(2, 3, 0.05, 0.05, 0.2, GridIndexing::kRowMajor);
    CHECK(rm(0, 2) < 1.0);
  }

  TEST_CASE("correlation properties") {
    for (auto [rows, cols] : {std::pair{4, 4}, std::pair{8, 8}, std::pair{3, 5}}) {
      const Eigen::MatrixXd r = build_correlation_matrix(rows, cols, 0.04, 0.04, 0.158);
      const int n = rows * cols;
      CHECK((r - r.transpose()).norm() == 0.0);
      CHECK(r.diagonal().isOnes());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-9 * n);
    }
    // Shift invariance along a square grid.
    const Eigen::MatrixXd r = build_correlation_matrix(4, 4, 0.05, 0.05, 0.158);
    CHECK(r(0, 5) == doctest::Approx(r(1, 6)));
    CHECK(r(0, 1) == doctest::Approx(r(4, 5)));
  }

  TEST_CASE("transposed grid keeps the spectrum under row-major indexing") {
    const Eigen::MatrixXd a = build_correlation_matrix(3, 5, 0.05, 0.05, 0.158, GridIndexing::kRowMajor);
    const Eigen::MatrixXd b = build_correlation_matrix(5, 3, 0.05, 0.05, 0.158, GridIndexing::kRowMajor);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(a), eb(b);
    CHECK((ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("large scale gain") {
    CHECK(large_scale_gain(1.0, 3.7) == doctest::Approx(1e-3));
    CHECK(large_scale_gain(10.0, 4.0) == doctest::Approx(1e-7));
    CHECK(large_scale_gain(10.0, 2.5) == doctest::Approx(3.16228e-6).epsilon(1e-5));
    CHECK(large_scale_gain(0.2, 4.0) == doctest::Approx(1e-3));
  }

  TEST_CASE("layout") {
    Scenario s;
    s.num_aps = 1;
    const NetworkRealization one = sample_layout(s, 3);
    CHECK(one.ap_positions[0].norm() < 1e-12);

    s = Scenario{};
    const NetworkRealization a = sample_layout(s, 42), b = sample_layout(s, 42), c = sample_layout(s, 43);
    CHECK(a.direct_gain == b.direct_gain);
    CHECK(a.correlation == b.correlation);
    CHECK(a.direct_gain != c.direct_gain);
    CHECK(a.direct_gain.maxCoeff() <= 1e-3);
    CHECK(a.direct_gain.minCoeff() > 0.0);
    CHECK(a.ap_ris_gain.minCoeff() > 0.0);
    CHECK(a.ris_user_gain.minCoeff() > 0.0);
    CHECK(a.ris_position.isApprox(Eigen::Vector2d(-s.radius, 0.0)));
    for (const auto& u : a.user_positions) CHECK(u.norm() <= s.radius);
    for (const auto& p : a.ap_positions) CHECK(p.y() == 0.0);
    const int m = 3, k = 5;
    const Eigen::MatrixXd rm = a.ap_covariance(m);
    CHECK(rm.isApprox(a.ap_ris_gain(m) * s.element_area() * a.correlation));
    CHECK(a.user_covariance(k).isApprox(a.ris_user_gain(k) * s.element_area() * a.correlation));
  }

  TEST_CASE("psd factor reproduces the clipped matrix") {
    const Eigen::MatrixXd r = build_correlation_matrix(4, 4, 0.05, 0.05, 0.158);
    const Eigen::MatrixXd f = psd_factor(r);
    CHECK((f * f.transpose() - r).norm() < 1e-8 * r.norm());
  }
}
