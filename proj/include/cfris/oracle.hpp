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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfris/channel.hpp"
#include "cfris/estimation.hpp"
#include "cfris/perf.hpp"

namespace cfris {

/// Per-column sums from a block-parallel Monte Carlo run. Trials are split
/// into fixed-size blocks, each drawing from its own substream; block sums are
/// combined by a pairwise tree in block order, so the result does not depend
/// on the number of threads.
struct TrialSums {
  std::int64_t trials = 0;
  std::vector<double> total;                    // per-column sum over all trials
  std::vector<std::vector<double>> block_total;  // per-block sums
  std::vector<std::int64_t> block_trials;

  std::vector<double> means() const;
};

inline constexpr std::int64_t kTrialBlock = 8192;

using TrialFn = std::function<void(RandomStream&, std::span<double>)>;

/// Runs `trials` calls of fn; fn writes `width` values which are summed.
TrialSums run_trials(std::int64_t trials, std::uint64_t seed, std::uint64_t tag, std::size_t width,
                     const TrialFn& fn);

/// Value of a statistic of the column means, with a batch-means standard
/// error over full blocks (NaN when fewer than two full blocks).
struct Estimate {
  double value = 0.0;
  double std_err = 0.0;
};
Estimate estimate(const TrialSums& sums, const std::function<double(const std::vector<double>&)>& statistic);

/// Training observations projected on each user's pilot, M x K. The surface
/// noise is sample.pilot_noise; ap_noise is M x tau_p. Zero either to switch
/// that source off.
Eigen::MatrixXcd simulate_pilot_phase(const Scenario& s, const RisState& ris, const PilotPlan& plan,
                                      const ChannelSample& sample, const Eigen::MatrixXcd& ap_noise);

/// Received data-phase samples y_m (length M). The surface noise is
/// sample.data_noise; ap_noise has length M.
Eigen::VectorXcd simulate_data_phase(const Scenario& s, const RisState& ris, const ChannelSample& sample,
                                     const Eigen::VectorXcd& symbols, const Eigen::VectorXcd& ap_noise);

/// Matrix of iid CN(0, variance) entries.
Eigen::MatrixXcd draw_noise(Eigen::Index rows, Eigen::Index cols, double variance, RandomStream& rng);

/// Monte Carlo counterparts of the expectation groups for one user.
struct EmpiricalSinr {
  SinrGroups groups;
  SinrGroups std_err;
  /// Too few trials for the estimate to be meaningful.
  bool low_confidence = false;
};

inline constexpr std::int64_t kMinAuthoritativeTrials = 10000;

std::vector<EmpiricalSinr> empirical_sinr_all(const Scenario& s, const NetworkRealization& net,
                                              const RisState& ris, const PilotPlan& plan, std::int64_t trials,
                                              std::uint64_t seed);
EmpiricalSinr empirical_sinr(const Scenario& s, const NetworkRealization& net, const RisState& ris,
                             const PilotPlan& plan, int k, std::int64_t trials, std::uint64_t seed);

enum class RowStatus { kPass, kFail, kInfo };

struct IdentityRow {
  std::string name;
  double empirical = 0.0;
  double analytic = 0.0;
  double rel_err = 0.0;
  double std_err = 0.0;
  double tolerance = 0.0;
  std::int64_t trials = 0;
  RowStatus status = RowStatus::kInfo;
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  bool low_confidence = false;

  bool all_pass() const;
};

/// Closed-form quantity names the identity suite checks; each appears as the
/// prefix of at least one report row.
const std::vector<std::string>& checked_quantities();

struct SuiteOptions {
  std::int64_t trials = 1000000;
  double moment_tolerance = 0.05;
  double estimation_tolerance = 0.02;
  double sinr_tolerance = 0.05;
  double power_tolerance = 0.02;
};

/// Runs every moment, estimation and SINR identity against Monte Carlo on one
/// realization and surface state.
IdentityReport verify_moment_identities(const Scenario& s, const NetworkRealization& net, const RisState& ris,
                                        const PilotPlan& plan, std::uint64_t seed, const SuiteOptions& opt = {});

/// Frobenius-relative error of the sample mean of x x^H A x x^H against
/// R A R + tr(AR) R for x ~ CN(0, R).
Estimate wishart_check(const Eigen::MatrixXd& covariance, const Eigen::MatrixXcd& weight, std::int64_t trials,
                       std::uint64_t seed);

const char* status_name(RowStatus s);

}  // namespace cfris
