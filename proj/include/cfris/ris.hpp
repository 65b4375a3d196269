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

#include <Eigen/Dense>

#include "cfris/config.hpp"

namespace cfris {

struct AmplitudeGain {
  double value = 0.0;
  /// Circuit and bias power alone exceed the surface budget; value is 0.
  bool budget_exhausted = false;
  /// The amplifier limit was hit.
  bool at_limit = false;
};

/// Common amplitude gain that spends the surface power budget, capped at the
/// amplifier limit. ris_user_gain holds the surface-to-user gains (may be empty).
AmplitudeGain amplitude_gain(const Scenario& s, const Eigen::VectorXd& ris_user_gain);

/// Output power radiated by the surface at amplitude `gain`.
double aris_output_power(const Scenario& s, const Eigen::VectorXd& ris_user_gain, double gain);

/// Total surface consumption: per-element circuit and bias plus output / xi.
double aris_total_power(const Scenario& s, const Eigen::VectorXd& ris_user_gain, double gain);

/// Wraps an angle into [0, 2 pi).
double wrap_phase(double angle);

/// Diagonal reflection coefficients gain * exp(j phase).
Eigen::VectorXcd reflection_diagonal(const Eigen::VectorXd& phases, double gain);
Eigen::MatrixXcd reflection_matrix(const Eigen::VectorXd& phases, double gain);

struct RisState {
  Eigen::VectorXd phases;
  double gain = 0.0;

  int num_elements() const { return static_cast<int>(phases.size()); }
  Eigen::VectorXcd diagonal() const { return reflection_diagonal(phases, gain); }
  Eigen::MatrixXcd matrix() const { return reflection_matrix(phases, gain); }
};

}  // namespace cfris
