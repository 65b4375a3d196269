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

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "cfris/channel.hpp"
#include "cfris/config.hpp"
#include "cfris/estimation.hpp"
#include "cfris/ris.hpp"
#include "cfris/scenario.hpp"

namespace cfris {

/// Expectation groups of the MRC decision statistic for one user. All are
/// powers; sinr = desired / (uncertainty + sum(interference) + ris_noise + ap_noise).
struct SinrGroups {
  double desired = 0.0;                // DS: |E{signal gain}|^2
  double uncertainty = 0.0;            // BU: variance of the signal gain
  std::vector<double> interference;    // UI per user, 0 at the user itself
  double ris_noise = 0.0;              // AN: surface noise through the combiner
  double ap_noise = 0.0;               // NO: AP thermal noise through the combiner
  double sinr = 0.0;

  double denominator() const;
};

/// Eight-addend shorthand with separate numerator amplitude and noise floor.
struct SinrBreakdown {
  double amplitude = 0.0;             // I1
  std::array<double, 8> terms{};      // I2 addends
  double floor = 0.0;                 // I3
  double sinr = 0.0;
};

/// E|qhat_mk|^2 for the coefficient actually in use.
double estimate_power(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est,
                      const PilotPlan& plan, int m, int k);

SinrGroups sinr_groups(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est,
                       const PilotPlan& plan, int k);

SinrBreakdown sinr_shorthand(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est,
                             const PilotPlan& plan, int k);

/// Dispatches on s.sinr_form.
double sinr_closed_form(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est,
                        const PilotPlan& plan, int k);

/// Cov(qhat_mk^* q_mk, qhat_m2k^* q_m2k) for m != m2. The coset channels and
/// the pilot-phase surface noise are shared by both APs.
double gain_cross_covariance(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est,
                             const PilotPlan& plan, int m, int m2, int k);
/// Same, keeping only the coset channel terms.
double gain_cross_covariance_shorthand(const SecondOrderStats& st, const EstimationStats& est,
                                       const PilotPlan& plan, int m, int m2, int k);

double se_per_user(double sinr, bool prelog, int pilot_length, int coherence_length);

double sum_se(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est, const PilotPlan& plan);

/// Backhaul power with the sum rate split evenly over the APs.
double backhaul_power(const Scenario& s, double sum_se_value);

/// Delivered bits per joule.
double energy_efficiency(const Scenario& s, double sum_se_value, const Eigen::VectorXd& ris_user_gain, double gain);

/// Everything the closed forms produce for one surface configuration.
struct Performance {
  SecondOrderStats stats;
  EstimationStats est;
  Eigen::VectorXd sinr;
  Eigen::VectorXd se;
  double sum_se = 0.0;
};

Performance evaluate(const Scenario& s, const NetworkRealization& net, const PilotPlan& plan, const RisState& ris);

}  // namespace cfris
