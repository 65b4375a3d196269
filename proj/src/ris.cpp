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

#include "cfris/ris.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace cfris {

AmplitudeGain amplitude_gain(const Scenario& s, const Eigen::VectorXd& ris_user_gain) {
  const double n = s.num_elements();
  const double numerator = s.amplifier_efficiency * (s.ris_budget - n * (s.circuit_power + s.bias_power));
  const double denominator = n * (s.data_power * s.element_area() * ris_user_gain.sum() + s.ris_noise);
  AmplitudeGain out;
  if (numerator <= 0.0) {
    out.budget_exhausted = true;
    out.value = 0.0;
    return out;
  }
  const double free = std::sqrt(numerator / denominator);
  out.at_limit = free >= s.max_gain;
  out.value = std::min(free, s.max_gain);
  return out;
}

double aris_output_power(const Scenario& s, const Eigen::VectorXd& ris_user_gain, double gain) {
  const double n = s.num_elements();
  return gain * gain * n * (s.data_power * s.element_area() * ris_user_gain.sum() + s.ris_noise);
}

double aris_total_power(const Scenario& s, const Eigen::VectorXd& ris_user_gain, double gain) {
  return s.num_elements() * (s.circuit_power + s.bias_power) +
         aris_output_power(s, ris_user_gain, gain) / s.amplifier_efficiency;
}

double wrap_phase(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(angle, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

Eigen::VectorXcd reflection_diagonal(const Eigen::VectorXd& phases, double gain) {
  Eigen::VectorXcd d(phases.size());
  for (Eigen::Index n = 0; n < phases.size(); ++n) d(n) = std::polar(gain, phases(n));
  return d;
}

Eigen::MatrixXcd reflection_matrix(const Eigen::VectorXd& phases, double gain) {
  return reflection_diagonal(phases, gain).asDiagonal();
}

}  // namespace cfris
