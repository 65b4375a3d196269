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

#include "cfris/channel.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace cfris {

PhaseInvariants phase_invariants(const Eigen::MatrixXd& correlation, const Eigen::MatrixXd& correlation_sq,
                                 const Eigen::VectorXd& phases) {
  const Eigen::Index n = correlation.rows();
  PhaseInvariants out;
  out.trace = correlation.trace();
  out.trace_sq = correlation.cwiseAbs2().sum();

  // D R with D = Psi R Psi^H; its trace and squared trace give the couplings.
  const Eigen::VectorXcd psi = reflection_diagonal(phases, 1.0);
  Eigen::MatrixXcd d(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) d(i, j) = psi(i) * correlation(i, j) * std::conj(psi(j));
  }
  const Eigen::MatrixXcd dr = d * correlation;
  std::complex<double> c1 = 0.0, c2 = 0.0, c3 = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      c1 += d(i, j) * correlation(j, i);
      c3 += d(i, j) * correlation_sq(j, i);
      c2 += dr(i, j) * dr(j, i);
    }
  }
  out.coupling = c1.real();
  out.coupling_sq = c2.real();
  out.coupling_mix = c3.real();
  return out;
}

double SecondOrderStats::xi_pair_trace(int m, int j, int m2, int i) const {
  const double a2 = gain * gain;
  const double s2 = element_area * element_area;
  return a2 * a2 * s2 * s2 * ap_ris_gain(m) * ris_user_gain(j) * ap_ris_gain(m2) * ris_user_gain(i) *
         inv.coupling_sq;
}

double SecondOrderStats::cascade_trace(int m, int j, int m2) const {
  const double a2 = gain * gain;
  return a2 * a2 * std::pow(element_area, 3) * ap_ris_gain(m) * ap_ris_gain(m2) * ris_user_gain(j) *
         inv.coupling_sq;
}

double SecondOrderStats::cascade_trace_open(int m, int j, int m2) const {
  const double a2 = gain * gain;
  return a2 * a2 * std::pow(element_area, 3) * ap_ris_gain(m) * ap_ris_gain(m2) * ris_user_gain(j) *
         inv.coupling_mix;
}

double SecondOrderStats::noise_cascade_trace(int m, int m2) const {
  const double a2 = gain * gain;
  return a2 * a2 * element_area * element_area * ap_ris_gain(m) * ap_ris_gain(m2) * inv.coupling_mix;
}

double SecondOrderStats::noise_cascade_trace_open(int m, int m2) const {
  const double a2 = gain * gain;
  return a2 * a2 * element_area * element_area * ap_ris_gain(m) * ap_ris_gain(m2) * inv.trace_sq;
}

SecondOrderStats compute_stats(const Scenario& s, const NetworkRealization& net, const RisState& ris) {
  SecondOrderStats st;
  st.gain = ris.gain;
  st.element_area = net.element_area;
  st.num_elements = net.num_elements();
  st.inv = phase_invariants(net.correlation, net.correlation_sq, ris.phases);
  st.ap_ris_gain = net.ap_ris_gain;
  st.ris_user_gain = net.ris_user_gain;
  st.direct_gain = net.direct_gain;

  const int m_count = net.num_aps();
  const int k_count = net.num_users();
  const double a2 = ris.gain * ris.gain;
  const double area = net.element_area;
  const double n = st.num_elements;
  st.kappa.resize(m_count, k_count);
  st.trace_xi.resize(m_count, k_count);
  st.noise_moment.resize(m_count, k_count);
  for (int m = 0; m < m_count; ++m) {
    const double tr_rm = st.ap_trace(m);
    const double alpha = net.ap_ris_gain(m);
    for (int k = 0; k < k_count; ++k) {
      const double alpha_bar = net.ris_user_gain(k);
      const double beta = net.direct_gain(m, k);
      const double tr_xi = a2 * alpha * alpha_bar * area * area * st.inv.coupling;
      st.trace_xi(m, k) = tr_xi;
      st.kappa(m, k) = beta + tr_xi;
      if (s.noise_moment == NoiseMomentForm::kGeneral) {
        st.noise_moment(m, k) =
            s.ris_noise * a2 *
            (beta * tr_rm + a2 * alpha_bar * alpha * alpha * std::pow(area, 3) * st.inv.coupling_mix +
             tr_rm * tr_xi);
      } else {
        const double tr_rm_sq = alpha * alpha * area * area * st.inv.trace_sq;
        const double tr_rbar = alpha_bar * area * n;
        st.noise_moment(m, k) = n * s.ris_noise * a2 * beta * tr_rm +
                                n * n * s.ris_noise * a2 * a2 * (tr_rm_sq + tr_rm * tr_rm) * tr_rbar;
      }
    }
  }
  return st;
}

double fourth_moment(const SecondOrderStats& st, int m, int k) {
  const double kap = st.kappa(m, k);
  return 2.0 * kap * kap + 2.0 * st.xi_pair_trace(m, k, m, k);
}

double cross_moment(const SecondOrderStats& st, int m, int m2, int k, int k2) {
  if (m == m2 && k == k2) throw std::invalid_argument("cross_moment: identical index pair, use fourth_moment");
  const double base = st.kappa(m, k) * st.kappa(m2, k2);
  if (m != m2 && k != k2) return base;
  // A shared AP or a shared user correlates the two cascaded terms.
  return base + st.xi_pair_trace(m, k, m2, k2);
}

double four_product_moment(const SecondOrderStats& st, int m, int m2, int k, int k2) {
  if (m == m2 || k == k2) throw std::invalid_argument("four_product_moment: needs m != m2 and k != k2");
  return st.xi_pair_trace(m, k2, m2, k);
}

Eigen::MatrixXcd xi_matrix(const NetworkRealization& net, const RisState& ris, int m, int k) {
  const Eigen::MatrixXcd theta = ris.matrix();
  const Eigen::MatrixXcd rbar = net.user_covariance(k).cast<std::complex<double>>();
  const Eigen::MatrixXcd rm = net.ap_covariance(m).cast<std::complex<double>>();
  return theta * rbar * theta.adjoint() * rm;
}

Eigen::VectorXcd sample_correlated_vector(const Eigen::MatrixXd& factor, double scale, RandomStream& rng) {
  const Eigen::Index n = factor.cols();
  Eigen::VectorXcd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = rng.complex_normal();
  return std::sqrt(scale) * (factor.cast<std::complex<double>>() * w);
}

Eigen::VectorXcd sample_correlated_vector(const Eigen::MatrixXd& covariance, RandomStream& rng) {
  return sample_correlated_vector(psd_factor(covariance), 1.0, rng);
}

ChannelSample sample_channels(const Scenario& s, const NetworkRealization& net, const RisState& ris,
                              RandomStream& rng) {
  const int m_count = net.num_aps();
  const int k_count = net.num_users();
  const Eigen::Index n = net.num_elements();
  ChannelSample out;
  out.ap_links.reserve(m_count);
  out.user_links.reserve(k_count);
  for (int m = 0; m < m_count; ++m) {
    out.ap_links.push_back(
        sample_correlated_vector(net.correlation_factor, net.ap_ris_gain(m) * net.element_area, rng));
  }
  for (int k = 0; k < k_count; ++k) {
    out.user_links.push_back(
        sample_correlated_vector(net.correlation_factor, net.ris_user_gain(k) * net.element_area, rng));
  }
  out.direct.resize(m_count, k_count);
  for (int k = 0; k < k_count; ++k) {
    for (int m = 0; m < m_count; ++m) out.direct(m, k) = rng.complex_normal(net.direct_gain(m, k));
  }
  const Eigen::VectorXcd theta = ris.diagonal();
  out.aggregate.resize(m_count, k_count);
  for (int k = 0; k < k_count; ++k) {
    const Eigen::VectorXcd reflected = theta.cwiseProduct(out.user_links[k]);
    for (int m = 0; m < m_count; ++m) {
      out.aggregate(m, k) = out.direct(m, k) + out.ap_links[m].dot(reflected);
    }
  }
  out.pilot_noise.resize(n, s.pilot_length);
  for (int t = 0; t < s.pilot_length; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) out.pilot_noise(i, t) = rng.complex_normal(s.ris_noise);
  }
  out.data_noise.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.data_noise(i) = rng.complex_normal(s.ris_noise);
  return out;
}

}  // namespace cfris
