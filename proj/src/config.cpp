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

#include "cfris/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cfris {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

struct IntField {
  int Scenario::*member;
};
struct RealField {
  double Scenario::*member;
  bool is_power;
};

const std::map<std::string, IntField>& int_fields() {
  static const std::map<std::string, IntField> fields = {
      {"M", {&Scenario::num_aps}},       {"K", {&Scenario::num_users}},
      {"N_H", {&Scenario::ris_rows}},    {"N_V", {&Scenario::ris_cols}},
      {"tau_p", {&Scenario::pilot_length}}, {"tau_c", {&Scenario::coherence_length}},
  };
  return fields;
}

const std::map<std::string, RealField>& real_fields() {
  static const std::map<std::string, RealField> fields = {
      {"d_H", {&Scenario::element_width, false}},
      {"d_V", {&Scenario::element_height, false}},
      {"carrier_hz", {&Scenario::carrier_hz, false}},
      {"radius", {&Scenario::radius, false}},
      {"rho", {&Scenario::pilot_power, true}},
      {"rho_u", {&Scenario::data_power, true}},
      {"sigma2", {&Scenario::ap_noise, true}},
      {"sigma2_bar", {&Scenario::ris_noise, true}},
      {"beta_exp", {&Scenario::direct_exponent, false}},
      {"alpha1_exp", {&Scenario::ap_ris_exponent, false}},
      {"alpha2_exp", {&Scenario::ris_user_exponent, false}},
      {"P_aris", {&Scenario::ris_budget, true}},
      {"P_c", {&Scenario::circuit_power, true}},
      {"P_dc", {&Scenario::bias_power, true}},
      {"xi", {&Scenario::amplifier_efficiency, false}},
      {"a_max", {&Scenario::max_gain, false}},
      {"zeta", {&Scenario::user_pa_efficiency, false}},
      {"P0", {&Scenario::backhaul_fixed, true}},
      {"Pbt", {&Scenario::backhaul_per_bps, false}},
      {"B", {&Scenario::bandwidth, false}},
  };
  return fields;
}

template <typename Enum>
Enum parse_enum(const nlohmann::json& v, const std::string& key,
                std::initializer_list<std::pair<const char*, Enum>> choices) {
  if (!v.is_string()) throw ConfigError("option '" + key + "' must be a string");
  const auto text = v.get<std::string>();
  for (const auto& [name, value] : choices) {
    if (text == name) return value;
  }
  throw ConfigError("option '" + key + "' has unknown value '" + text + "'");
}

double number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("key '" + key + "' is not finite");
  return x;
}

int integer(const nlohmann::json& v, const std::string& key) {
  const double x = number(v, key);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError("key '" + key + "' must be an integer");
  return static_cast<int>(x);
}

// Shortest round-trippable decimal so the canonical dump (and hash) is stable.
std::string format_real(double x) {
  char buf[64];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

}  // namespace

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void validate(const Scenario& s) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(s.num_aps >= 1, "M must be >= 1");
  require(s.num_users >= 1, "K must be >= 1");
  require(s.ris_rows >= 1 && s.ris_cols >= 1, "N_H and N_V must be >= 1");
  require(s.pilot_length >= 1, "tau_p must be >= 1");
  require(s.pilot_length <= s.coherence_length, "tau_p must not exceed tau_c");
  require(s.carrier_hz > 0.0, "carrier frequency must be positive");
  require(s.element_width >= 0.0 && s.element_height >= 0.0, "element size must be positive");
  require(s.radius > 0.0, "radius must be positive");
  for (double p : {s.pilot_power, s.data_power, s.ap_noise, s.ris_noise, s.ris_budget, s.circuit_power,
                   s.bias_power, s.backhaul_fixed, s.backhaul_per_bps, s.bandwidth}) {
    require(p >= 0.0, "powers must be non-negative");
  }
  require(s.ris_noise > 0.0, "sigma2_bar must be positive");
  require(s.ap_noise > 0.0, "sigma2 must be positive");
  require(s.direct_exponent >= 0.0 && s.ap_ris_exponent >= 0.0 && s.ris_user_exponent >= 0.0,
          "path-loss exponents must be non-negative");
  require(s.amplifier_efficiency > 0.0 && s.amplifier_efficiency <= 1.0, "xi must lie in (0, 1]");
  require(s.user_pa_efficiency > 0.0 && s.user_pa_efficiency <= 1.0, "zeta must lie in (0, 1]");
  require(s.max_gain >= 1.0, "a_max must be >= 1");
}

Scenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  Scenario s;
  for (const auto& [key, value] : j.items()) {
    if (auto it = int_fields().find(key); it != int_fields().end()) {
      s.*(it->second.member) = integer(value, key);
      continue;
    }
    if (auto it = real_fields().find(key); it != real_fields().end()) {
      s.*(it->second.member) = number(value, key);
      continue;
    }
    if (key.size() > 4 && key.ends_with("_dbm")) {
      const auto base = key.substr(0, key.size() - 4);
      auto it = real_fields().find(base);
      if (it == real_fields().end() || !it->second.is_power) throw ConfigError("unknown key '" + key + "'");
      if (j.contains(base)) throw ConfigError("both '" + base + "' and '" + key + "' given");
      s.*(it->second.member) = dbm_to_watt(number(value, key));
      continue;
    }
    if (key == "lambda") {
      s.carrier_hz = kSpeedOfLight / number(value, key);
    } else if (key == "a_max_db") {
      s.max_gain = std::pow(10.0, number(value, key) / 20.0);
    } else if (key == "position_divisor") {
      s.grid_indexing = parse_enum<GridIndexing>(value, key, {{"N_V", GridIndexing::kVerbatim},
                                                              {"N_H", GridIndexing::kRowMajor}});
    } else if (key == "pilot_basis") {
      s.pilot_basis = parse_enum<PilotBasis>(value, key, {{"canonical", PilotBasis::kCanonical},
                                                          {"dft", PilotBasis::kDft}});
    } else if (key == "pilot_noise") {
      s.pilot_noise = parse_enum<PilotNoiseForm>(value, key, {{"exact", PilotNoiseForm::kExact},
                                                              {"shorthand", PilotNoiseForm::kShorthand}});
    } else if (key == "alpha_form") {
      s.noise_moment = parse_enum<NoiseMomentForm>(value, key, {{"general", NoiseMomentForm::kGeneral},
                                                                {"shorthand", NoiseMomentForm::kSimplified}});
    } else if (key == "sinr_form") {
      s.sinr_form = parse_enum<SinrForm>(value, key, {{"exact", SinrForm::kExact},
                                                      {"shorthand", SinrForm::kShorthand}});
    } else if (key == "prelog") {
      if (!value.is_boolean()) throw ConfigError("option 'prelog' must be a boolean");
      s.prelog = value.get<bool>();
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  if (j.contains("lambda") && j.contains("carrier_hz")) throw ConfigError("both 'lambda' and 'carrier_hz' given");
  if (j.contains("a_max") && j.contains("a_max_db")) throw ConfigError("both 'a_max' and 'a_max_db' given");
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse config '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  for (const auto& [key, field] : int_fields()) j[key] = s.*(field.member);
  for (const auto& [key, field] : real_fields()) j[key] = s.*(field.member);
  j["d_H"] = s.width();
  j["d_V"] = s.height();
  j["position_divisor"] = s.grid_indexing == GridIndexing::kVerbatim ? "N_V" : "N_H";
  j["pilot_basis"] = s.pilot_basis == PilotBasis::kCanonical ? "canonical" : "dft";
  j["pilot_noise"] = s.pilot_noise == PilotNoiseForm::kExact ? "exact" : "shorthand";
  j["alpha_form"] = s.noise_moment == NoiseMomentForm::kGeneral ? "general" : "shorthand";
  j["sinr_form"] = s.sinr_form == SinrForm::kExact ? "exact" : "shorthand";
  j["prelog"] = s.prelog;
  return j;
}

std::string config_hash(const Scenario& s) {
  // Hash a hand-rolled dump so float formatting does not depend on the JSON
  // library's number printer.
  const auto j = scenario_to_json(s);
  std::ostringstream text;
  for (const auto& [key, value] : j.items()) {
    text << key << '=';
    if (value.is_number_float()) {
      text << format_real(value.get<double>());
    } else {
      text << value.dump();
    }
    text << ';';
  }
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text.str()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario with_parameter(Scenario s, const std::string& key, double value) {
  if (key == "N") {
    const int n = static_cast<int>(std::lround(value));
    if (n < 1) throw ConfigError("N must be >= 1");
    const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (root * root == n) {
      s.ris_rows = s.ris_cols = root;
    } else if (n % s.ris_cols == 0) {
      s.ris_rows = n / s.ris_cols;
    } else {
      s.ris_rows = n;
      s.ris_cols = 1;
    }
  } else if (key == "d") {
    if (value <= 0.0) throw ConfigError("element size must be positive");
    s.element_width = s.element_height = value;
  } else {
    nlohmann::json j = scenario_to_json(s);
    const bool is_int = int_fields().count(key) > 0;
    if (is_int) {
      j[key] = static_cast<int>(std::lround(value));
    } else {
      const bool direct = real_fields().count(key) > 0 || key == "lambda" || key == "a_max_db" ||
                          (key.ends_with("_dbm") && real_fields().count(key.substr(0, key.size() - 4)) > 0);
      if (!direct) throw ConfigError("'" + key + "' is not a sweepable scenario field");
      if (key.ends_with("_dbm")) j.erase(key.substr(0, key.size() - 4));
      if (key == "lambda") j.erase("carrier_hz");
      if (key == "a_max_db") j.erase("a_max");
      j[key] = value;
    }
    s = scenario_from_json(j);
  }
  validate(s);
  return s;
}

}  // namespace cfris
