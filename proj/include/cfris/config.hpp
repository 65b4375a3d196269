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

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace cfris {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which coordinate divides the element index when laying out the grid.
/// kVerbatim uses the column count for the floor division (the default
/// reading); kRowMajor uses the row count, which enumerates a proper grid.
enum class GridIndexing { kVerbatim, kRowMajor };
enum class PilotBasis { kCanonical, kDft };
/// Pilot-phase RIS noise power in the LMMSE denominator: kExact uses the
/// trace of the AP-RIS covariance, kShorthand drops the element area factor.
enum class PilotNoiseForm { kExact, kShorthand };
/// Active-noise cross moment: kGeneral is the Wishart-derived expression,
/// kSimplified is the shorthand with N and N^2 prefactors.
enum class NoiseMomentForm { kGeneral, kSimplified };
/// SINR closed form: kExact is the full term-by-term expectation, kShorthand
/// the eight-addend shorthand.
enum class SinrForm { kExact, kShorthand };

/// Static system parameters. All powers in watts, lengths in meters.
struct Scenario {
  int num_aps = 20;
  int num_users = 15;
  int ris_rows = 8;  // N_H
  int ris_cols = 8;  // N_V
  double element_width = 0.0;   // d_H; 0 means wavelength / 4
  double element_height = 0.0;  // d_V; 0 means wavelength / 4
  double carrier_hz = 1.9e9;
  double radius = 500.0;

  double pilot_power = 0.1;
  double data_power = 0.1;
  int pilot_length = 15;
  int coherence_length = 200;
  double ap_noise = 1e-11;
  double ris_noise = 1e-11;

  double direct_exponent = 4.0;
  double ap_ris_exponent = 2.5;
  double ris_user_exponent = 2.5;

  double ris_budget = 1.0;
  double circuit_power = 1e-4;
  double bias_power = 3.1622776601683794e-4;
  double amplifier_efficiency = 0.8;
  double max_gain = 10.0;

  double user_pa_efficiency = 0.4;
  double backhaul_fixed = 0.825;
  double backhaul_per_bps = 2.5e-10;
  double bandwidth = 20e6;

  GridIndexing grid_indexing = GridIndexing::kVerbatim;
  PilotBasis pilot_basis = PilotBasis::kCanonical;
  PilotNoiseForm pilot_noise = PilotNoiseForm::kExact;
  NoiseMomentForm noise_moment = NoiseMomentForm::kGeneral;
  SinrForm sinr_form = SinrForm::kExact;
  bool prelog = false;

  int num_elements() const { return ris_rows * ris_cols; }
  double wavelength() const { return 299792458.0 / carrier_hz; }
  double width() const { return element_width > 0.0 ? element_width : wavelength() / 4.0; }
  double height() const { return element_height > 0.0 ? element_height : wavelength() / 4.0; }
  double element_area() const { return width() * height(); }
};

double dbm_to_watt(double dbm);

/// Throws ConfigError when an invariant is violated.
void validate(const Scenario& s);

/// Flat key-value form. Powers may be given in dBm with a `_dbm` suffix.
/// Unknown keys are rejected.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

/// Canonical fully-resolved form (SI units, sorted keys).
nlohmann::json scenario_to_json(const Scenario& s);

/// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const Scenario& s);

/// Sets one scalar parameter by its config key. Pseudo-keys: "N" resizes the
/// surface (square when N is a perfect square, else keeps ris_cols when it
/// divides N, else N x 1); "d" sets both element dimensions.
Scenario with_parameter(Scenario s, const std::string& key, double value);

}  // namespace cfris
