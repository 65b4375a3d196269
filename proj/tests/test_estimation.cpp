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
#include <set>

#include "cfris/channel.hpp"
#include "cfris/estimation.hpp"
#include "cfris/oracle.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cfris;
using cfris::testing::rel_diff;

TEST_SUITE("estimation") {
  TEST_CASE("round-robin pilots") {
    const PilotPlan p = assign_pilots(4, 2);
    CHECK(p.coset[0] == std::vector<int>{0, 2});
    CHECK(p.coset[1] == std::vector<int>{1, 3});
    CHECK(p.coset[2] == p.coset[0]);
    CHECK(p.shares_pilot(1, 3));
    CHECK_FALSE(p.shares_pilot(0, 1));
    const PilotPlan q = assign_pilots(15, 15);
    for (int k = 0; k < 15; ++k) CHECK(q.coset[k] == std::vector<int>{k});
    for (auto basis : {PilotBasis::kCanonical, PilotBasis::kDft}) {
      const PilotPlan b = assign_pilots(5, 4, basis);
      CHECK((b.basis.adjoint() * b.basis - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);
    }
  }

  TEST_CASE("coefficient at equal signal and noise") {
    Scenario s;
    s.num_aps = 1;
    s.num_users = 1;
    s.pilot_length = 1;
    const NetworkRealization net = sample_layout(s, 3);
    const SecondOrderStats st = compute_stats(s, net, RisState{Eigen::VectorXd::Zero(s.num_elements()), 0.0});
    s.pilot_power = s.ap_noise / net.direct_gain(0, 0);
    const PilotPlan plan = assign_pilots(1, 1);
    CHECK(lmmse_coefficient(s, st, plan, 0, 0) == doctest::Approx(0.5));
    CHECK(nmse(compute_estimation(s, st, plan), 0, 0) == doctest::Approx(0.5));
  }

  TEST_CASE("matches a direct transcription with dense traces") {
    Scenario s;
    s.num_aps = 3;
    s.num_users = 5;
    s.pilot_length = 2;
    s.ris_rows = s.ris_cols = 4;
    const NetworkRealization net = sample_layout(s, 8);
    const RisState ris{testing::draw_phases(16, 8), amplitude_gain(s, net.ris_user_gain).value};
    const testing::DenseReference ref(net, ris);
    const PilotPlan plan = assign_pilots(5, 2);
    for (auto form : {PilotNoiseForm::kExact, PilotNoiseForm::kShorthand}) {
      s.pilot_noise = form;
      const SecondOrderStats st = compute_stats(s, net, ris);
      const EstimationStats est = compute_estimation(s, st, plan);
      for (int m = 0; m < 3; ++m) {
        const double a2 = ris.gain * ris.gain;
        const double surface = form == PilotNoiseForm::kExact
                                   ? s.ris_noise * a2 * net.ap_covariance(m).trace()
                                   : s.ris_noise * a2 * net.ap_ris_gain(m) * 16;
        for (int k = 0; k < 5; ++k) {
          double sum = 0.0;
          for (int j = k % 2; j < 5; j += 2) sum += ref.kappa(m, j);
          const double rt = s.pilot_power * 2;
          const double c = rt * ref.kappa(m, k) / (rt * sum + surface + s.ap_noise);
          CHECK(rel_diff(est.coeff(m, k), c) < 1e-12);
          CHECK(est.coeff(m, k) > 0.0);
          CHECK(est.coeff(m, k) < 1.0);
          CHECK(rel_diff(est.variance(m, k), c * ref.kappa(m, k)) < 1e-12);
          // Estimate and error powers add up to the channel power.
          CHECK(rel_diff(est.variance(m, k) + est.nmse(m, k) * st.kappa(m, k), st.kappa(m, k)) < 1e-14);
        }
      }
    }
  }

  TEST_CASE("nmse falls with pilot power and floors only under contamination") {
    Scenario s;
    s.num_aps = 2;
    s.num_users = 4;
    s.ris_rows = s.ris_cols = 4;
    const NetworkRealization net = sample_layout(s, 4);
    const RisState ris{Eigen::VectorXd::Zero(16), amplitude_gain(s, net.ris_user_gain).value};
    const SecondOrderStats st = compute_stats(s, net, ris);
    for (int tau : {4, 2}) {
      s.pilot_length = tau;
      const PilotPlan plan = assign_pilots(4, tau);
      double prev = 2.0;
      for (int db = -40; db <= 140; db += 10) {
        s.pilot_power = dbm_to_watt(db);
        const double v = compute_estimation(s, st, plan).nmse(0, 1);
        CHECK(v < prev);
        prev = v;
      }
      double share = 0.0;
      for (int j : plan.coset[1]) share += st.kappa(0, j);
      const double limit = 1.0 - st.kappa(0, 1) / share;
      if (tau == 4) {
        CHECK(limit == 0.0);
        CHECK(prev < 1e-6);
      } else {
        CHECK(limit > 0.0);
        CHECK(rel_diff(prev, limit) < 1e-6);
      }
    }
  }

  TEST_CASE("equal phases minimize nmse with orthogonal pilots") {
    Scenario s;
    s.num_aps = 3;
    s.num_users = 3;
    s.pilot_length = 3;
    s.ris_rows = s.ris_cols = 4;
    const NetworkRealization net = sample_layout(s, 6);
    const double a = amplitude_gain(s, net.ris_user_gain).value;
    const PilotPlan plan = assign_pilots(3, 3);
    const double equal =
        mean_nmse(compute_estimation(s, compute_stats(s, net, RisState{Eigen::VectorXd::Zero(16), a}), plan));
    for (int i = 0; i < 20; ++i) {
      const RisState r{testing::draw_phases(16, 100 + i), a};
      CHECK(equal <= mean_nmse(compute_estimation(s, compute_stats(s, net, r), plan)));
    }
  }

  TEST_CASE("empirical estimate statistics") {
    const Scenario s = testing::small_instance();
    const NetworkRealization net = sample_layout(s, 7);
    const RisState ris{testing::draw_phases(4, 3), amplitude_gain(s, net.ris_user_gain).value};
    const SecondOrderStats st = compute_stats(s, net, ris);
    const PilotPlan plan = assign_pilots(3, 2);
    const EstimationStats est = compute_estimation(s, st, plan);
    RandomStream rng(31, 2);
    const int draws = 100000;
    Eigen::MatrixXd est_pow = Eigen::MatrixXd::Zero(2, 3), err_pow = est_pow, q_pow = est_pow;
    Eigen::MatrixXcd cross = Eigen::MatrixXcd::Zero(2, 3);
    for (int i = 0; i < draws; ++i) {
      const ChannelSample smp = sample_channels(s, net, ris, rng);
      const Eigen::MatrixXcd w = draw_noise(2, 2, s.ap_noise, rng);
      const Eigen::MatrixXcd qhat = estimate_channels(simulate_pilot_phase(s, ris, plan, smp, w), est);
      const Eigen::MatrixXcd e = smp.aggregate - qhat;
      est_pow += qhat.cwiseAbs2();
      err_pow += e.cwiseAbs2();
      q_pow += smp.aggregate.cwiseAbs2();
      cross += qhat.conjugate().cwiseProduct(e);
    }
    for (int m = 0; m < 2; ++m) {
      for (int k = 0; k < 3; ++k) {
        CHECK(rel_diff(est_pow(m, k) / draws, est.variance(m, k)) < 0.02);
        CHECK(rel_diff(err_pow(m, k) / draws, st.kappa(m, k) - est.variance(m, k)) < 0.02);
        CHECK(rel_diff(err_pow(m, k) / q_pow(m, k), est.nmse(m, k)) < 0.02);
        const double corr = std::abs(cross(m, k)) / std::sqrt(est_pow(m, k) * err_pow(m, k));
        CHECK(corr < 0.01);
      }
    }
  }
}
