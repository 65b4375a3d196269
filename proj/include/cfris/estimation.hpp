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

#include <vector>

#include <Eigen/Dense>

#include "cfris/channel.hpp"
#include "cfris/config.hpp"

namespace cfris {

/// Pilot assignment. Users sharing a pilot form a coset; coset[k] includes k.
struct PilotPlan {
  int pilot_length = 0;
  std::vector<int> pilot_of;
  std::vector<std::vector<int>> coset;
  /// Columns are the orthonormal pilot sequences s_t.
  Eigen::MatrixXcd basis;

  int num_users() const { return static_cast<int>(pilot_of.size()); }
  bool shares_pilot(int k, int j) const { return pilot_of[k] == pilot_of[j]; }
};

/// Round-robin: user k gets pilot k mod tau_p.
PilotPlan assign_pilots(int num_users, int pilot_length, PilotBasis basis = PilotBasis::kCanonical);

struct EstimationStats {
  Eigen::MatrixXd coeff;     // c_mk
  Eigen::MatrixXd variance;  // gamma_mk = E|qhat_mk|^2
  Eigen::MatrixXd nmse;      // 1 - c_mk
};

/// Surface-noise power leaking into the pilot projection at AP m, before the
/// 1 / (rho tau_p) scaling.
double pilot_noise_power(const Scenario& s, const SecondOrderStats& st, int m);

/// rho tau_p E|y^p_mk|^2.
double pilot_denominator(const Scenario& s, const SecondOrderStats& st, const PilotPlan& plan, int m, int k);

double lmmse_coefficient(const Scenario& s, const SecondOrderStats& st, const PilotPlan& plan, int m, int k);

EstimationStats compute_estimation(const Scenario& s, const SecondOrderStats& st, const PilotPlan& plan);

/// qhat = c .* y^p (projections are M x K).
Eigen::MatrixXcd estimate_channels(const Eigen::MatrixXcd& projections, const EstimationStats& est);

inline double nmse(const EstimationStats& est, int m, int k) { return 1.0 - est.coeff(m, k); }

/// Mean NMSE over all (m, k).
double mean_nmse(const EstimationStats& est);

}  // namespace cfris
