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

#include "cfris/perf.hpp"

#include <cmath>
#include <numeric>

namespace cfris {

namespace {

// tr(B_m Rbar_j B_m2 Rz_k) with Rz_k the pilot-projected effective covariance
// of the surface-side user link: coset covariances plus scaled pilot noise.
double cascade_with_pilot(const Scenario& s, const SecondOrderStats& st, const PilotPlan& plan, int m, int j,
                          int m2, int k) {
  double coset_gain = 0.0;
  for (int i : plan.coset[k]) coset_gain += st.ris_user_gain(i);
  const double noise = s.ris_noise / (s.pilot_power * plan.pilot_length);
  return coset_gain * st.element_area * st.cascade_trace(m, j, m2) + noise * st.cascade_trace_open(m, j, m2);
}

double noise_cascade_with_pilot(const Scenario& s, const SecondOrderStats& st, const PilotPlan& plan, int m,
                                int m2, int k) {
  double coset_gain = 0.0;
  for (int i : plan.coset[k]) coset_gain += st.ris_user_gain(i);
  const double noise = s.ris_noise / (s.pilot_power * plan.pilot_length);
  return coset_gain * st.element_area * st.noise_cascade_trace(m, m2) + noise * st.noise_cascade_trace_open(m, m2);
}

}  // namespace

double SinrGroups::denominator() const {
  return uncertainty + std::accumulate(interference.begin(), interference.end(), 0.0) + ris_noise + ap_noise;
}

double estimate_power(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est,
                      const PilotPlan& plan, int m, int k) {
  const double c = est.coeff(m, k);
  return c * c * pilot_denominator(s, st, plan, m, k) / (s.pilot_power * plan.pilot_length);
}

SinrGroups sinr_groups(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est,
                       const PilotPlan& plan, int k) {
  const int m_count = st.num_aps();
  const int k_count = st.num_users();
  const double a2 = st.gain * st.gain;
  std::vector<double> est_power(m_count);
  double gain_mean = 0.0;
  for (int m = 0; m < m_count; ++m) {
    est_power[m] = estimate_power(s, st, est, plan, m, k);
    gain_mean += est.coeff(m, k) * st.kappa(m, k);
  }

  // Second moment of sum_m qhat_mk^* q_mj, without the rho_u factor.
  auto total = [&](int j) {
    double v = 0.0;
    for (int m = 0; m < m_count; ++m) v += est_power[m] * st.kappa(m, j);
    for (int m = 0; m < m_count; ++m) {
      for (int m2 = 0; m2 < m_count; ++m2) {
        v += est.coeff(m, k) * est.coeff(m2, k) * cascade_with_pilot(s, st, plan, m, j, m2, k);
      }
    }
    if (plan.shares_pilot(k, j)) {
      double coherent = 0.0;
      for (int m = 0; m < m_count; ++m) {
        const double c = est.coeff(m, k);
        v += c * c * st.xi_pair_trace(m, j, m, j);
        coherent += c * st.kappa(m, j);
      }
      v += coherent * coherent;
    }
    return v;
  };

  SinrGroups g;
  g.desired = s.data_power * gain_mean * gain_mean;
  g.uncertainty = s.data_power * total(k) - g.desired;
  g.interference.assign(k_count, 0.0);
  for (int j = 0; j < k_count; ++j) {
    if (j != k) g.interference[j] = s.data_power * total(j);
  }
  double an_direct = 0.0;
  double an_cross = 0.0;
  double no = 0.0;
  for (int m = 0; m < m_count; ++m) {
    an_direct += est_power[m] * a2 * st.ap_trace(m);
    no += est_power[m];
    for (int m2 = 0; m2 < m_count; ++m2) {
      an_cross += est.coeff(m, k) * est.coeff(m2, k) * noise_cascade_with_pilot(s, st, plan, m, m2, k);
    }
  }
  g.ris_noise = s.ris_noise * (an_direct + an_cross);
  g.ap_noise = s.ap_noise * no;
  const double den = g.denominator();
  g.sinr = den > 0.0 ? g.desired / den : 0.0;
  return g;
}

SinrBreakdown sinr_shorthand(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est,
                             const PilotPlan& plan, int k) {
  const int m_count = st.num_aps();
  const int k_count = st.num_users();
  const double rho_u = s.data_power;
  const double rho_tau = s.pilot_power * plan.pilot_length;
  const auto& c = est.coeff;
  const auto& coset = plan.coset[k];
  SinrBreakdown b;
  auto& t = b.terms;

  for (int j = 0; j < k_count; ++j) {
    for (int i : coset) {
      for (int m = 0; m < m_count; ++m) {
        for (int m2 = 0; m2 < m_count; ++m2) t[0] += c(m, k) * c(m2, k) * st.xi_pair_trace(m, j, m2, i);
      }
    }
  }
  for (int m = 0; m < m_count; ++m) t[1] += est.variance(m, k) * est.variance(m, k);
  for (int j = 0; j < k_count; ++j) {
    if (j == k) continue;
    for (int i : coset) {
      for (int m = 0; m < m_count; ++m) t[2] += c(m, k) * c(m, k) * st.kappa(m, i) * st.kappa(m, j);
    }
  }
  for (int j = 0; j < k_count; ++j) {
    for (int m = 0; m < m_count; ++m) {
      t[3] += c(m, k) * c(m, k) * st.noise_moment(m, j);
      t[4] += c(m, k) * c(m, k) * st.kappa(m, j);
    }
  }
  t[3] /= rho_tau;
  t[4] *= s.ap_noise / rho_tau;
  for (int j : coset) {
    if (j == k) continue;
    double coherent = 0.0;
    for (int m = 0; m < m_count; ++m) coherent += c(m, k) * st.kappa(m, j);
    t[5] += coherent * coherent;
  }
  for (int j : coset) {
    for (int m = 0; m < m_count; ++m) {
      t[6] += c(m, k) * c(m, k) * st.kappa(m, j) * st.kappa(m, j);
      t[7] += c(m, k) * c(m, k) * st.xi_pair_trace(m, j, m, j);
    }
  }
  for (double& term : t) term *= rho_u;

  double gamma_sum = 0.0;
  for (int m = 0; m < m_count; ++m) {
    gamma_sum += est.variance(m, k);
    b.floor += st.noise_moment(m, k) + s.ap_noise * st.kappa(m, k);
  }
  b.amplitude = std::sqrt(rho_u) * gamma_sum;
  const double den = std::accumulate(t.begin(), t.end(), 0.0) + b.floor;
  b.sinr = den > 0.0 ? b.amplitude * b.amplitude / den : 0.0;
  return b;
}

double sinr_closed_form(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est,
                        const PilotPlan& plan, int k) {
  if (s.sinr_form == SinrForm::kShorthand) return sinr_shorthand(s, st, est, plan, k).sinr;
  return sinr_groups(s, st, est, plan, k).sinr;
}

double gain_cross_covariance(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est,
                             const PilotPlan& plan, int m, int m2, int k) {
  return est.coeff(m, k) * est.coeff(m2, k) * cascade_with_pilot(s, st, plan, m, k, m2, k);
}

double gain_cross_covariance_shorthand(const SecondOrderStats& st, const EstimationStats& est,
                                       const PilotPlan& plan, int m, int m2, int k) {
  double v = 0.0;
  for (int i : plan.coset[k]) v += st.xi_pair_trace(m, k, m2, i);
  return est.coeff(m, k) * est.coeff(m2, k) * v;
}

double se_per_user(double sinr, bool prelog, int pilot_length, int coherence_length) {
  const double se = std::log2(1.0 + sinr);
  if (!prelog) return se;
  return (1.0 - static_cast<double>(pilot_length) / coherence_length) * se;
}

double sum_se(const Scenario& s, const SecondOrderStats& st, const EstimationStats& est, const PilotPlan& plan) {
  double total = 0.0;
  for (int k = 0; k < st.num_users(); ++k) {
    total += se_per_user(sinr_closed_form(s, st, est, plan, k), s.prelog, s.pilot_length, s.coherence_length);
  }
  return total;
}

double backhaul_power(const Scenario& s, double sum_se_value) {
  const double per_ap_rate = s.bandwidth * sum_se_value / s.num_aps;
  return s.num_aps * (s.backhaul_fixed + per_ap_rate * s.backhaul_per_bps);
}

double energy_efficiency(const Scenario& s, double sum_se_value, const Eigen::VectorXd& ris_user_gain,
                         double gain) {
  if (sum_se_value <= 0.0) return 0.0;
  const double users = s.num_users * s.user_pa_efficiency * s.data_power;
  const double total = users + backhaul_power(s, sum_se_value) + aris_total_power(s, ris_user_gain, gain);
  return s.bandwidth * sum_se_value / total;
}

Performance evaluate(const Scenario& s, const NetworkRealization& net, const PilotPlan& plan,
                     const RisState& ris) {
  Performance p;
  p.stats = compute_stats(s, net, ris);
  p.est = compute_estimation(s, p.stats, plan);
  const int k_count = net.num_users();
  p.sinr.resize(k_count);
  p.se.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    p.sinr(k) = sinr_closed_form(s, p.stats, p.est, plan, k);
    p.se(k) = se_per_user(p.sinr(k), s.prelog, s.pilot_length, s.coherence_length);
  }
  p.sum_se = p.se.sum();
  return p;
}

}  // namespace cfris
