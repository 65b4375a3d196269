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

#include "cfris/config.hpp"
#include "cfris/ris.hpp"
#include "cfris/rng.hpp"
#include "cfris/scenario.hpp"

namespace cfris {

/// Phase-dependent traces of the unit correlation R. With D = Psi R Psi^H:
///   coupling      = tr(D R)
///   coupling_sq   = tr(D R D R)
///   coupling_mix  = tr(D R^2)
/// Every closed-form moment is a product of large-scale gains and one of
/// these (or tr R = N, tr R^2).
struct PhaseInvariants {
  double coupling = 0.0;
  double coupling_sq = 0.0;
  double coupling_mix = 0.0;
  double trace = 0.0;
  double trace_sq = 0.0;
};

PhaseInvariants phase_invariants(const Eigen::MatrixXd& correlation, const Eigen::MatrixXd& correlation_sq,
                                 const Eigen::VectorXd& phases);

/// Second-order statistics of the aggregated channels for one surface state.
struct SecondOrderStats {
  double gain = 0.0;
  double element_area = 0.0;
  int num_elements = 0;
  PhaseInvariants inv;
  Eigen::VectorXd ap_ris_gain;
  Eigen::VectorXd ris_user_gain;
  Eigen::MatrixXd direct_gain;

  Eigen::MatrixXd kappa;         // E|q_mk|^2, M x K
  Eigen::MatrixXd trace_xi;      // tr Xi_mk, M x K
  Eigen::MatrixXd noise_moment;  // E|pbar_mk^* q_mk|^2 (pilot RIS noise times channel), M x K

  int num_aps() const { return static_cast<int>(kappa.rows()); }
  int num_users() const { return static_cast<int>(kappa.cols()); }

  /// tr R_m.
  double ap_trace(int m) const { return ap_ris_gain(m) * element_area * inv.trace; }
  /// tr(Xi_{m,j} Xi_{m2,i}); the same scalar for every index arrangement.
  double xi_pair_trace(int m, int j, int m2, int i) const;
  /// tr(B_m Rbar_j B_m2 R) with B_m = Theta^H R_m Theta.
  double cascade_trace(int m, int j, int m2) const;
  /// tr(B_m Rbar_j B_m2).
  double cascade_trace_open(int m, int j, int m2) const;
  /// tr(B_m B_m2 R).
  double noise_cascade_trace(int m, int m2) const;
  /// tr(B_m B_m2).
  double noise_cascade_trace_open(int m, int m2) const;
};

SecondOrderStats compute_stats(const Scenario& s, const NetworkRealization& net, const RisState& ris);

/// E|q_mk|^4.
double fourth_moment(const SecondOrderStats& st, int m, int k);

/// E|q_{m,k} q_{m2,k2}^*|^2 for (m, k) != (m2, k2); throws std::invalid_argument
/// on the identical pair (use fourth_moment).
double cross_moment(const SecondOrderStats& st, int m, int m2, int k, int k2);

/// E{q_{m,k}^* q_{m,k2} q_{m2,k2}^* q_{m2,k}} for m != m2, k != k2.
double four_product_moment(const SecondOrderStats& st, int m, int m2, int k, int k2);

/// Dense Xi_mk = a^2 Psi Rbar_k Psi^H R_m, for cross-checks.
Eigen::MatrixXcd xi_matrix(const NetworkRealization& net, const RisState& ris, int m, int k);

/// CN(0, scale * F F^T) with F a precomputed factor.
Eigen::VectorXcd sample_correlated_vector(const Eigen::MatrixXd& factor, double scale, RandomStream& rng);
/// CN(0, covariance) via an eigenvalue-clipped factor.
Eigen::VectorXcd sample_correlated_vector(const Eigen::MatrixXd& covariance, RandomStream& rng);

/// One fading realization plus the surface noise for a coherence block.
struct ChannelSample {
  std::vector<Eigen::VectorXcd> ap_links;    // h_m
  std::vector<Eigen::VectorXcd> user_links;  // z_k
  Eigen::MatrixXcd direct;     // g, M x K
  Eigen::MatrixXcd aggregate;  // q, M x K
  Eigen::MatrixXcd pilot_noise;  // surface noise during training, N x tau_p
  Eigen::VectorXcd data_noise;   // surface noise during one data symbol
};

ChannelSample sample_channels(const Scenario& s, const NetworkRealization& net, const RisState& ris,
                              RandomStream& rng);

}  // namespace cfris
