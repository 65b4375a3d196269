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

#include "cfris/estimation.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace cfris {

PilotPlan assign_pilots(int num_users, int pilot_length, PilotBasis basis) {
  PilotPlan plan;
  plan.pilot_length = pilot_length;
  plan.pilot_of.resize(num_users);
  for (int k = 0; k < num_users; ++k) plan.pilot_of[k] = k % pilot_length;
  plan.coset.resize(num_users);
  for (int k = 0; k < num_users; ++k) {
    for (int j = 0; j < num_users; ++j) {
      if (plan.pilot_of[j] == plan.pilot_of[k]) plan.coset[k].push_back(j);
    }
  }
  if (basis == PilotBasis::kCanonical) {
    plan.basis = Eigen::MatrixXcd::Identity(pilot_length, pilot_length);
  } else {
    plan.basis.resize(pilot_length, pilot_length);
    const double norm = 1.0 / std::sqrt(static_cast<double>(pilot_length));
    for (int r = 0; r < pilot_length; ++r) {
      for (int c = 0; c < pilot_length; ++c) {
        plan.basis(r, c) = std::polar(norm, -2.0 * std::numbers::pi * r * c / pilot_length);
      }
    }
  }
  return plan;
}

double pilot_noise_power(const Scenario& s, const SecondOrderStats& st, int m) {
  const double a2 = st.gain * st.gain;
  if (s.pilot_noise == PilotNoiseForm::kShorthand) {
    return s.ris_noise * a2 * st.ap_ris_gain(m) * st.num_elements;
  }
  return s.ris_noise * a2 * st.ap_trace(m);
}

double pilot_denominator(const Scenario& s, const SecondOrderStats& st, const PilotPlan& plan, int m, int k) {
  const double rho_tau = s.pilot_power * plan.pilot_length;
  double contaminated = 0.0;
  for (int j : plan.coset[k]) contaminated += st.kappa(m, j);
  return rho_tau * contaminated + pilot_noise_power(s, st, m) + s.ap_noise;
}

double lmmse_coefficient(const Scenario& s, const SecondOrderStats& st, const PilotPlan& plan, int m, int k) {
  const double rho_tau = s.pilot_power * plan.pilot_length;
  return rho_tau * st.kappa(m, k) / pilot_denominator(s, st, plan, m, k);
}

EstimationStats compute_estimation(const Scenario& s, const SecondOrderStats& st, const PilotPlan& plan) {
  const int m_count = st.num_aps();
  const int k_count = st.num_users();
  EstimationStats est;
  est.coeff.resize(m_count, k_count);
  for (int m = 0; m < m_count; ++m) {
    for (int k = 0; k < k_count; ++k) est.coeff(m, k) = lmmse_coefficient(s, st, plan, m, k);
  }
  est.variance = est.coeff.cwiseProduct(st.kappa);
  est.nmse = Eigen::MatrixXd::Ones(m_count, k_count) - est.coeff;
  return est;
}

Eigen::MatrixXcd estimate_channels(const Eigen::MatrixXcd& projections, const EstimationStats& est) {
  return projections.cwiseProduct(est.coeff.cast<std::complex<double>>());
}

double mean_nmse(const EstimationStats& est) { return est.nmse.mean(); }

}  // namespace cfris
