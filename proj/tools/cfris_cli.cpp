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

// cfris: validation reports, parameter sweeps and surface-phase training.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfris/channel.hpp"
#include "cfris/config.hpp"
#include "cfris/csv.hpp"
#include "cfris/estimation.hpp"
#include "cfris/oracle.hpp"
#include "cfris/perf.hpp"
#include "cfris/ris.hpp"
#include "cfris/sac.hpp"
#include "cfris/scenario.hpp"
#include "cfris/streams.hpp"
#include "json.hpp"

namespace {

using namespace cfris;

enum ExitCode { kOk = 0, kValidationFailure = 1, kUsage = 2, kDivergence = 3, kNonAuthoritative = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Eigen::VectorXd choose_phases(const std::string& mode, int n, std::uint64_t seed) {
  if (mode == "equal") return Eigen::VectorXd::Zero(n);
  if (mode == "random") {
    RandomStream rng(seed, streams::kPhases);
    Eigen::VectorXd ph(n);
    for (int i = 0; i < n; ++i) ph(i) = 2.0 * std::numbers::pi * rng.uniform();
    return ph;
  }
  if (mode.starts_with("trained:")) {
    Eigen::VectorXd ph = load_checkpoint_phases(mode.substr(8));
    if (ph.size() != n) {
      throw ConfigError("checkpoint has " + std::to_string(ph.size()) + " phases, surface has " +
                        std::to_string(n));
    }
    return ph;
  }
  throw UsageError("--phases must be equal, random or trained:<path>");
}

void emit(const CsvTable& table, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << table.str();
  } else {
    table.write(out);
  }
}

struct CommonOptions {
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
  std::string phases;
  bool prelog = false;
};

Scenario load_with_flags(const CommonOptions& o) {
  Scenario s = o.config.empty() ? Scenario{} : load_scenario(o.config);
  if (o.prelog) s.prelog = true;
  return s;
}

// Same as configs/validate_small.json: the surface path dominates, so every
// phase-dependent term is exercised.
constexpr const char* kValidationInstance = R"({
  "M": 2, "K": 3, "N_H": 2, "N_V": 2, "tau_p": 2,
  "radius": 30, "d_H": 4.0, "d_V": 4.0, "lambda": 32.0,
  "rho_dbm": 0, "rho_u_dbm": 0, "sigma2_dbm": -70, "sigma2_bar_dbm": -70,
  "beta_exp": 6, "alpha1_exp": 2, "alpha2_exp": 2})";

int run_validate(const CommonOptions& o, std::int64_t trials) {
  Scenario s = o.config.empty() ? scenario_from_json(nlohmann::json::parse(kValidationInstance)) : load_with_flags(o);
  if (o.prelog) s.prelog = true;
  const NetworkRealization net = sample_layout(s, o.seed);
  const AmplitudeGain gain = amplitude_gain(s, net.ris_user_gain);
  const RisState ris{choose_phases(o.phases.empty() ? "random" : o.phases, s.num_elements(), o.seed), gain.value};
  const PilotPlan plan = assign_pilots(s.num_users, s.pilot_length, s.pilot_basis);
  SuiteOptions opt;
  opt.trials = trials;
  const IdentityReport report = verify_moment_identities(s, net, ris, plan, o.seed, opt);

  CsvTable table(config_hash(s), o.seed,
                 {"quantity", "empirical", "analytic", "rel_err", "std_err", "tolerance", "trials", "status"});
  int failures = 0;
  for (const IdentityRow& r : report.rows) {
    if (r.status == RowStatus::kFail) ++failures;
    table.add_row({r.name, format_number(r.empirical), format_number(r.analytic), format_number(r.rel_err),
                   format_number(r.std_err), format_number(r.tolerance), std::to_string(r.trials),
                   status_name(r.status)});
  }
  emit(table, o.out);
  if (report.low_confidence) {
    std::cerr << "warning: " << trials << " trials is below " << kMinAuthoritativeTrials
              << "; report is not authoritative\n";
    return kNonAuthoritative;
  }
  std::cerr << failures << " of " << report.rows.size() << " rows failed\n";
  return failures == 0 ? kOk : kValidationFailure;
}

struct SweepSpec {
  Scenario base;
  std::string param;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::string out;
};

SweepSpec load_sweep(const std::string& path, const CommonOptions& o) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep spec '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse sweep spec '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("sweep spec must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "base" && key != "scenario" && key != "param" && key != "values" && key != "seeds" && key != "out") {
      throw ConfigError("unknown sweep key '" + key + "'");
    }
  }
  SweepSpec spec;
  if (j.contains("base") && j.contains("scenario")) throw ConfigError("give either 'base' or 'scenario'");
  if (j.contains("base")) {
    std::filesystem::path base = j.at("base").get<std::string>();
    if (base.is_relative()) base = std::filesystem::path(path).parent_path() / base;
    spec.base = load_scenario(base.string());
  } else if (j.contains("scenario")) {
    spec.base = scenario_from_json(j.at("scenario"));
  }
  if (o.prelog) spec.base.prelog = true;
  if (!j.contains("param") || !j.at("param").is_string()) throw ConfigError("sweep spec needs a 'param' string");
  spec.param = j.at("param").get<std::string>();
  try {
    spec.values = j.at("values").get<std::vector<double>>();
    spec.seeds = j.contains("seeds") ? j.at("seeds").get<std::vector<std::uint64_t>>()
                                     : std::vector<std::uint64_t>{o.seed};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad sweep values or seeds: ") + e.what());
  }
  if (spec.values.empty()) throw ConfigError("sweep 'values' is empty");
  if (spec.seeds.empty()) throw ConfigError("sweep 'seeds' is empty");
  spec.out = j.value("out", "");
  // Reject unknown parameters and out-of-range values before any work starts.
  for (double v : spec.values) with_parameter(spec.base, spec.param, v);
  return spec;
}

int run_sweep(const CommonOptions& o, const std::string& spec_path) {
  const SweepSpec spec = load_sweep(spec_path, o);
  const std::string mode = o.phases.empty() ? "equal" : o.phases;
  struct Point {
    double value;
    std::uint64_t seed;
    std::vector<std::string> cells;
  };
  std::vector<Point> points;
  for (double v : spec.values) {
    for (std::uint64_t seed : spec.seeds) points.push_back({v, seed, {}});
  }
  std::vector<std::string> errors(points.size());
  const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    Point& p = points[static_cast<std::size_t>(i)];
    try {
      const Scenario s = with_parameter(spec.base, spec.param, p.value);
      const NetworkRealization net = sample_layout(s, p.seed);
      const AmplitudeGain gain = amplitude_gain(s, net.ris_user_gain);
      const PilotPlan plan = assign_pilots(s.num_users, s.pilot_length, s.pilot_basis);
      const RisState ris{choose_phases(mode, s.num_elements(), p.seed), gain.value};
      const Performance perf = evaluate(s, net, plan, ris);
      const double ee = energy_efficiency(s, perf.sum_se, net.ris_user_gain, gain.value);
      const char* flag = gain.budget_exhausted ? "budget_exhausted" : gain.at_limit ? "gain_limit" : "ok";
      p.cells = {format_number(p.value),        std::to_string(p.seed),   format_number(perf.sum_se),
                 format_number(mean_nmse(perf.est)), format_number(gain.value), format_number(ee), flag};
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw ConfigError(e);
  }
  std::stable_sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
    return a.value != b.value ? a.value < b.value : a.seed < b.seed;
  });
  CsvTable table(config_hash(spec.base), o.seed, {"param_value", "seed", "sum_se", "nmse_mean", "a", "ee", "flag"});
  for (auto& p : points) table.add_row(std::move(p.cells));
  emit(table, o.out.empty() ? spec.out : o.out);
  return kOk;
}

struct TrainOptions {
  SacConfig sac;
  std::string checkpoint;
};

int run_train(const CommonOptions& o, const TrainOptions& t) {
  if (o.config.empty()) throw UsageError("train needs --config");
  const Scenario s = load_with_flags(o);
  const NetworkRealization net = sample_layout(s, o.seed);
  const RisEnv env(s, net);
  validate(t.sac);

  TrainResult result;
  try {
    result = train(env, t.sac, o.seed);
  } catch (const TrainingDivergence& e) {
    const std::string diag = (o.out.empty() ? std::string("cfris_train") : o.out) + ".diverged.json";
    nlohmann::json j{{"error", e.what()}, {"episode", e.episode}, {"step", e.step}, {"seed", o.seed},
                     {"config", scenario_to_json(s)}};
    std::ofstream(diag) << j.dump(1) << '\n';
    std::cerr << "training diverged: " << e.what() << "; diagnostics in " << diag << '\n';
    return kDivergence;
  }

  CsvTable table(config_hash(s), o.seed, {"episode", "cumulative_reward"});
  // Episode 0 is the reference: equal phases held for a whole episode.
  table.add_row({"0", format_number(result.equal_phase_sum_se * t.sac.episode_len)});
  for (std::size_t e = 0; e < result.episode_reward.size(); ++e) {
    table.add_row({std::to_string(e + 1), format_number(result.episode_reward[e])});
  }
  emit(table, o.out);
  const std::string ckpt = !t.checkpoint.empty() ? t.checkpoint
                           : (o.out.empty() || o.out == "-") ? std::string()
                                                             : o.out + ".ckpt.json";
  if (!ckpt.empty()) save_checkpoint(ckpt, result, t.sac);

  std::cerr << "best_sum_se=" << format_number(result.best_sum_se)
            << " equal_phase_sum_se=" << format_number(result.equal_phase_sum_se) << '\n';
  if (s.num_elements() == 1) {
    double grid_best = 0.0;
    for (int i = 0; i < 360; ++i) {
      grid_best = std::max(grid_best, env.sum_se(Eigen::VectorXd::Constant(1, 2.0 * std::numbers::pi * i / 360)));
    }
    std::cerr << "grid_optimum_sum_se=" << format_number(grid_best) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free uplink with an active surface: validation, sweeps, phase training"};
  app.require_subcommand(1);
  CommonOptions common;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", common.config, "scenario JSON");
    cmd->add_option("--seed", common.seed, "master seed")->capture_default_str();
    cmd->add_option("--out", common.out, "CSV output path (stdout when omitted)");
    cmd->add_flag("--prelog", common.prelog, "scale SE by (tau_c - tau_p) / tau_c");
  };

  std::int64_t trials = 1000000;
  auto* validate_cmd = app.add_subcommand("validate", "closed forms against Monte Carlo");
  add_common(validate_cmd);
  validate_cmd->add_option("--trials", trials, "Monte Carlo trials")->capture_default_str();
  validate_cmd->add_option("--phases", common.phases, "equal|random|trained:<path> (default random)");

  std::string spec_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "closed-form metrics over one parameter");
  add_common(sweep_cmd);
  sweep_cmd->add_option("spec", spec_path, "sweep spec JSON")->required();
  sweep_cmd->add_option("--phases", common.phases, "equal|random|trained:<path> (default equal)");

  TrainOptions topt;
  auto* train_cmd = app.add_subcommand("train", "learn surface phases with soft actor-critic");
  add_common(train_cmd);
  train_cmd->add_option("--episodes", topt.sac.episodes)->capture_default_str();
  train_cmd->add_option("--episode-len", topt.sac.episode_len)->capture_default_str();
  train_cmd->add_option("--lr", topt.sac.lr)->capture_default_str();
  train_cmd->add_option("--discount", topt.sac.discount)->capture_default_str();
  train_cmd->add_option("--polyak", topt.sac.polyak)->capture_default_str();
  train_cmd->add_option("--entropy-coeff", topt.sac.entropy_coeff)->capture_default_str();
  train_cmd->add_option("--batch", topt.sac.batch)->capture_default_str();
  train_cmd->add_option("--buffer", topt.sac.buffer_capacity)->capture_default_str();
  train_cmd->add_option("--hidden", topt.sac.hidden)->capture_default_str();
  train_cmd->add_option("--noise", topt.sac.exploration_noise)->capture_default_str();
  train_cmd->add_flag("--adam", topt.sac.adam, "Adam instead of plain SGD");
  train_cmd->add_option("--checkpoint", topt.checkpoint, "checkpoint path (default <out>.ckpt.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (validate_cmd->parsed()) return run_validate(common, trials);
    if (sweep_cmd->parsed()) return run_sweep(common, spec_path);
    return run_train(common, topt);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
