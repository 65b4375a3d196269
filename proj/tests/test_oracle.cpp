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

#include <omp.h>

#include "cfris/channel.hpp"
#include "cfris/estimation.hpp"
#include "cfris/oracle.hpp"
#include "cfris/perf.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cfris;

namespace {

void gaussian_trial(RandomStream& rng, std::span<double> row) {
  const double x = rng.normal();
  row[0] = x;
  row[1] = x * x;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("trial sums do not depend on the thread count") {
    std::vector<TrialSums> runs;
    for (int threads : {1, 2, 3, 8}) {
      omp_set_num_threads(threads);
      runs.push_back(run_trials(100003, 17, 5, 2, gaussian_trial));
    }
    omp_set_num_threads(1);
    for (const auto& r : runs) {
      CHECK(r.trials == 100003);
      CHECK(r.total == runs[0].total);
      CHECK(r.block_total == runs[0].block_total);
    }
    CHECK(runs[0].means()[1] == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("standard error shrinks like one over root n") {
    double ratio = 0.0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
      auto mean_of = [](const std::vector<double>& mu) { return mu[1]; };
      const double small = estimate(run_trials(kTrialBlock * 16, 100 + r, 5, 2, gaussian_trial), mean_of).std_err;
      const double large = estimate(run_trials(kTrialBlock * 32, 200 + r, 5, 2, gaussian_trial), mean_of).std_err;
      ratio += large / small / reps;
    }
    CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.1));
  }

  TEST_CASE("noise-free pilot projection recovers the channel") {
    Scenario s = testing::small_instance();
    s.ap_noise = 1e-300;
    s.ris_noise = 1e-300;
    const NetworkRealization net = sample_layout(s, 7);
    RisState ris{testing::draw_phases(4, 1), 0.0};
    for (auto basis : {PilotBasis::kCanonical, PilotBasis::kDft}) {
      // Three users on two pilots: user 1 is alone, users 0 and 2 share.
      const PilotPlan plan = assign_pilots(3, 2, basis);
      RandomStream rng(2, 2);
      const ChannelSample smp = sample_channels(s, net, ris, rng);
      const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(2, 2);
      const Eigen::MatrixXcd proj = simulate_pilot_phase(s, ris, plan, smp, zero);
      for (int m = 0; m < 2; ++m) {
        CHECK(std::abs(proj(m, 1) - smp.aggregate(m, 1)) < 1e-12 * std::abs(smp.aggregate(m, 1)));
        const auto shared = smp.aggregate(m, 0) + smp.aggregate(m, 2);
        CHECK(std::abs(proj(m, 0) - shared) < 1e-12 * std::abs(shared));
      }
    }
  }

  TEST_CASE("noise-free data phase") {
    Scenario s = testing::small_instance();
    s.num_users = 1;
    s.pilot_length = 1;
    const NetworkRealization net = sample_layout(s, 7);
    RisState ris{testing::draw_phases(4, 1), 0.0};
    RandomStream rng(3, 3);
    const ChannelSample smp = sample_channels(s, net, ris, rng);
    const Eigen::VectorXcd y =
        simulate_data_phase(s, ris, smp, Eigen::VectorXcd::Ones(1), Eigen::VectorXcd::Zero(2));
    CHECK(y.isApprox(std::sqrt(s.data_power) * smp.aggregate.col(0)));
  }

  TEST_CASE("few trials are flagged") {
    const Scenario s = testing::small_instance();
    const NetworkRealization net = sample_layout(s, 7);
    const RisState ris{testing::draw_phases(4, 1), amplitude_gain(s, net.ris_user_gain).value};
    const PilotPlan plan = assign_pilots(3, 2);
    CHECK(empirical_sinr(s, net, ris, plan, 0, 10, 1).low_confidence);
    CHECK_FALSE(empirical_sinr(s, net, ris, plan, 0, kMinAuthoritativeTrials, 1).low_confidence);
    CHECK(verify_moment_identities(s, net, ris, plan, 1, SuiteOptions{.trials = 10}).low_confidence);
  }

  TEST_CASE("every checked quantity appears in the report") {
    const Scenario s = testing::small_instance();
    const NetworkRealization net = sample_layout(s, 7);
    const RisState ris{testing::draw_phases(4, 1), amplitude_gain(s, net.ris_user_gain).value};
    const PilotPlan plan = assign_pilots(3, 2);
    const IdentityReport rep = verify_moment_identities(s, net, ris, plan, 1, SuiteOptions{.trials = 20000});
    for (const std::string& name : checked_quantities()) {
      const bool found = std::any_of(rep.rows.begin(), rep.rows.end(), [&](const IdentityRow& r) {
        return r.status != RowStatus::kInfo && (r.name == name || r.name.starts_with(name + "["));
      });
      CHECK_MESSAGE(found, name);
    }
    for (const IdentityRow& r : rep.rows) {
      const bool known = std::any_of(checked_quantities().begin(), checked_quantities().end(),
                                     [&](const std::string& n) { return r.name.starts_with(n); });
      CHECK_MESSAGE(known, r.name);
    }
  }

  TEST_CASE("report is identical across thread counts") {
    const Scenario s = testing::small_instance();
    const NetworkRealization net = sample_layout(s, 7);
    const RisState ris{testing::draw_phases(4, 1), amplitude_gain(s, net.ris_user_gain).value};
    const PilotPlan plan = assign_pilots(3, 2);
    omp_set_num_threads(1);
    const IdentityReport a = verify_moment_identities(s, net, ris, plan, 4, SuiteOptions{.trials = 30000});
    omp_set_num_threads(4);
    const IdentityReport b = verify_moment_identities(s, net, ris, plan, 4, SuiteOptions{.trials = 30000});
    omp_set_num_threads(1);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].empirical == b.rows[i].empirical);
      CHECK(a.rows[i].std_err == b.rows[i].std_err);
    }
  }

  TEST_CASE("scalar wishart") {
    const Estimate e = wishart_check(Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXcd::Ones(1, 1), 200000, 3);
    CHECK(e.value < 0.02);
  }

  TEST_CASE("degenerate surface passes the full suite") {
    const Scenario s = testing::small_instance();
    const NetworkRealization net = sample_layout(s, 7);
    const RisState ris{testing::draw_phases(4, 1), 0.0};
    const IdentityReport rep = verify_moment_identities(s, net, ris, assign_pilots(3, 2), 13);
    for (const IdentityRow& r : rep.rows) CHECK_MESSAGE(r.status != RowStatus::kFail, r.name);
  }
}
