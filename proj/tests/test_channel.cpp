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


#include <cmath>
#include <numbers>

#include "cfris/channel.hpp"
#include "cfris/oracle.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cfris;
using cfris::testing::DenseReference;
using cfris::testing::rel_diff;

namespace {

struct Fixture {
  Scenario s = testing::small_instance();
  NetworkRealization net = sample_layout(s, 7);
  RisState ris{testing::draw_phases(s.num_elements(), 3), amplitude_gain(s, net.ris_user_gain).value};
};

// Default-geometry surface with random phases, where R is far from identity.
struct WideFixture {
  Scenario s = [] {
    Scenario x;
    x.num_aps = 3;
    x.num_users = 3;
    x.ris_rows = x.ris_cols = 4;
    return x;
  }();
  NetworkRealization net = sample_layout(s, 11);
  RisState ris{testing::draw_phases(16, 5), amplitude_gain(s, net.ris_user_gain).value};
};

}  // namespace

TEST_SUITE("channel") {
  TEST_CASE("trace invariants agree with dense matrices") {
    WideFixture f;
    const SecondOrderStats st = compute_stats(f.s, f.net, f.ris);
    const DenseReference ref(f.net, f.ris);
    for (int m = 0; m < 3; ++m) {
      for (int k = 0; k < 3; ++k) {
        CHECK(rel_diff(st.kappa(m, k), ref.kappa(m, k)) < 1e-10);
        const std::complex<double> tr = ref.xi(m, k).trace();
        CHECK(std::abs(tr.imag()) < 1e-9 * std::abs(tr.real()));
        for (int m2 = 0; m2 < 3; ++m2) {
          for (int i = 0; i < 3; ++i) {
            CHECK(rel_diff(st.xi_pair_trace(m, k, m2, i), ref.xi_pair(m, k, m2, i)) < 1e-10);
            const std::complex<double> pair = (ref.xi(m, k) * ref.xi(m2, i)).trace();
            CHECK(std::abs(pair.imag()) < 1e-9 * std::abs(pair.real()));
          }
          CHECK(rel_diff(st.cascade_trace(m, k, m2), ref.cascade(m, k, m2)) < 1e-10);
          CHECK(rel_diff(st.cascade_trace_open(m, k, m2), ref.cascade_open(m, k, m2)) < 1e-10);
        }
      }
      for (int m2 = 0; m2 < 3; ++m2) {
        CHECK(rel_diff(st.noise_cascade_trace(m, m2), ref.noise_cascade(m, m2)) < 1e-10);
        CHECK(rel_diff(st.noise_cascade_trace_open(m, m2), ref.noise_cascade_open(m, m2)) < 1e-10);
      }
    }
    CHECK(xi_matrix(f.net, f.ris, 1, 2).isApprox(ref.xi(1, 2)));
  }

  TEST_CASE("identity correlation and equal phases") {
    Scenario s;
    s.num_aps = 2;
    s.num_users = 2;
    s.ris_rows = 6;
    s.ris_cols = 1;
    s.grid_indexing = GridIndexing::kRowMajor;
    s.element_width = s.element_height = s.wavelength() / 2;
    const NetworkRealization net = sample_layout(s, 2);
    CHECK((net.correlation - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-15);
    const RisState ris{Eigen::VectorXd::Zero(6), 3.0};
    const SecondOrderStats st = compute_stats(s, net, ris);
    const double area = s.element_area();
    const double expected = 9.0 * net.ap_ris_gain(1) * area * net.ris_user_gain(0) * area * 6;
    CHECK(st.trace_xi(1, 0) == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("zero gain removes the surface") {
    Fixture f;
    f.ris.gain = 0.0;
    const SecondOrderStats st = compute_stats(f.s, f.net, f.ris);
    CHECK(st.kappa == f.net.direct_gain);
    CHECK(st.noise_moment.isZero());
    CHECK(fourth_moment(st, 1, 2) == doctest::Approx(2 * std::pow(f.net.direct_gain(1, 2), 2)));
    CHECK(cross_moment(st, 0, 1, 0, 2) == doctest::Approx(f.net.direct_gain(0, 0) * f.net.direct_gain(1, 2)));
    RandomStream rng(1, 2);
    const ChannelSample smp = sample_channels(f.s, f.net, f.ris, rng);
    CHECK(smp.aggregate == smp.direct);
  }

  TEST_CASE("moment inequalities and misuse") {
    Fixture f;
    const SecondOrderStats st = compute_stats(f.s, f.net, f.ris);
    for (int m = 0; m < 2; ++m) {
      for (int k = 0; k < 3; ++k) {
        CHECK(fourth_moment(st, m, k) >= st.kappa(m, k) * st.kappa(m, k));
        CHECK(st.kappa(m, k) > 0.0);
        CHECK(st.noise_moment(m, k) > 0.0);
      }
    }
    CHECK_THROWS_AS(cross_moment(st, 1, 1, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(four_product_moment(st, 0, 0, 1, 2), std::invalid_argument);
  }

  TEST_CASE("global phase rotation leaves every moment unchanged") {
    WideFixture f;
    RisState rotated = f.ris;
    rotated.phases.array() += 1.234;
    for (auto form : {NoiseMomentForm::kGeneral, NoiseMomentForm::kSimplified}) {
      f.s.noise_moment = form;
      const SecondOrderStats a = compute_stats(f.s, f.net, f.ris);
      const SecondOrderStats b = compute_stats(f.s, f.net, rotated);
      CHECK(rel_diff(a.inv.coupling, b.inv.coupling) < 1e-12);
      CHECK(rel_diff(a.inv.coupling_sq, b.inv.coupling_sq) < 1e-12);
      CHECK(rel_diff(a.inv.coupling_mix, b.inv.coupling_mix) < 1e-12);
      CHECK((a.noise_moment - b.noise_moment).norm() <= 1e-12 * a.noise_moment.norm());
    }
  }

  TEST_CASE("correlated vector sampling") {
    RandomStream rng(4, 4);
    CHECK(sample_correlated_vector(Eigen::MatrixXd::Zero(3, 3), rng).isZero());

    const int n = 4, draws = 100000;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < draws; ++i) {
      const Eigen::VectorXcd x = sample_correlated_vector(Eigen::MatrixXd::Identity(n, n), rng);
      acc += x * x.adjoint();
    }
    acc /= draws;
    CHECK((acc - Eigen::MatrixXcd::Identity(n, n)).norm() / std::sqrt(double(n)) < 0.05);

    const Eigen::MatrixXd cov = build_correlation_matrix(2, 2, 0.05, 0.05, 0.158);
    RandomStream r1(9, 1), r2(9, 1);
    const Eigen::VectorXcd base = sample_correlated_vector(cov, r1);
    const Eigen::VectorXcd scaled = sample_correlated_vector(4.0 * cov, r2);
    CHECK(scaled.isApprox(2.0 * base, 1e-10));
  }

  TEST_CASE("sampled channels") {
    Fixture f;
    const SecondOrderStats st = compute_stats(f.s, f.net, f.ris);
    RandomStream rng(21, 1);
    const ChannelSample one = sample_channels(f.s, f.net, f.ris, rng);
    const Eigen::VectorXcd theta = f.ris.diagonal();
    for (int m = 0; m < 2; ++m) {
      for (int k = 0; k < 3; ++k) {
        const std::complex<double> built =
            one.direct(m, k) + (one.ap_links[m].adjoint() * theta.asDiagonal() * one.user_links[k])(0);
        CHECK(std::abs(built - one.aggregate(m, k)) < 1e-12 * std::abs(built));
      }
    }

    const int draws = 100000;
    std::complex<double> mean = 0.0;
    double power = 0.0, noise = 0.0;
    const int m = 1, k = 2;
    for (int i = 0; i < draws; ++i) {
      const ChannelSample smp = sample_channels(f.s, f.net, f.ris, rng);
      const std::complex<double> q = smp.aggregate(m, k);
      mean += q;
      power += std::norm(q);
      const std::complex<double> p = smp.ap_links[m].dot(theta.cwiseProduct(smp.pilot_noise.col(0)));
      noise += std::norm(std::conj(p) * q);
    }
    mean /= double(draws);
    power /= draws;
    noise /= draws;
    const double band = 4.0 * std::sqrt(st.kappa(m, k) / (2.0 * draws));
    CHECK(std::abs(mean.real()) < band);
    CHECK(std::abs(mean.imag()) < band);
    CHECK(rel_diff(power, st.kappa(m, k)) < 0.02);
    CHECK(rel_diff(noise, st.noise_moment(m, k)) < 0.03);
  }

  TEST_CASE("wishart identity on a small surface") {
    const Eigen::MatrixXd cov = build_correlation_matrix(2, 2, 0.05, 0.05, 0.158);
    Eigen::MatrixXcd weight = Eigen::MatrixXcd::Zero(4, 4);
    weight.diagonal() << 1.0, 2.0, 0.5, 1.5;
    weight(0, 1) = {0.3, 0.2};
    weight(1, 0) = std::conj(weight(0, 1));
    const Estimate e = wishart_check(cov, weight, 200000, 5);
    CHECK(e.value < 0.05);
  }
}
