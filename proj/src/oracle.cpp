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

#include "cfris/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "cfris/streams.hpp"

namespace cfris {

namespace {

using cd = std::complex<double>;

std::vector<double> tree_sum(const std::vector<std::vector<double>>& parts, std::size_t lo, std::size_t hi,
                             std::size_t width) {
  if (hi - lo == 0) return std::vector<double>(width, 0.0);
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  auto left = tree_sum(parts, lo, mid, width);
  const auto right = tree_sum(parts, mid, hi, width);
  for (std::size_t i = 0; i < width; ++i) left[i] += right[i];
  return left;
}

double relative_error(double empirical, double analytic) {
  if (analytic == 0.0) return empirical == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(empirical - analytic) / std::abs(analytic);
}

// Column layout of one identity-suite trial.
struct SuiteLayout {
  int aps, users, pilots;
  bool has_cross, has_other_pilot;

  std::size_t q_sq(int m, int k) const { return static_cast<std::size_t>(m * users + k); }
  std::size_t q_fourth(int m, int k) const { return mk() + q_sq(m, k); }
  std::size_t cross(int i) const { return 2 * mk() + i; }  // 0..4 moments, 5..6 correlation
  std::size_t noise(int m, int k) const { return 2 * mk() + 7 + q_sq(m, k); }
  std::size_t noise_other(int m, int k) const { return 3 * mk() + 7 + q_sq(m, k); }
  // Estimation block: 7 values per (m, k).
  std::size_t est(int m, int k, int field) const { return 4 * mk() + 7 + 7 * q_sq(m, k) + field; }
  std::size_t pair_base() const { return 11 * mk() + 7; }
  std::size_t pair(int k, int p, int part) const { return pair_base() + 2 * (k * pairs() + p) + part; }
  std::size_t sinr_base() const { return pair_base() + 2 * users * pairs(); }
  std::size_t gain(int k, int part) const { return sinr_base() + 2 * k + part; }
  std::size_t gain_sq(int k, int j) const { return sinr_base() + 2 * users + k * users + j; }
  std::size_t an(int k) const { return sinr_base() + 2 * users + users * users + k; }
  std::size_t no(int k) const { return an(k) + users; }
  std::size_t mrc(int k) const { return an(k) + 2 * users; }
  std::size_t data_noise(int m) const { return sinr_base() + 5 * users + users * users + m; }
  std::size_t data_power(int m) const { return data_noise(m) + aps; }
  std::size_t output_power() const { return data_noise(0) + 2 * aps; }
  std::size_t width() const { return output_power() + 1; }

  std::size_t mk() const { return static_cast<std::size_t>(aps * users); }
  int pairs() const { return aps * (aps - 1) / 2; }
};

enum EstField { kProj = 0, kEstSq, kErrSq, kOrthRe, kOrthIm, kGainRe, kGainIm };

}  // namespace

std::vector<double> TrialSums::means() const {
  std::vector<double> out(total.size());
  for (std::size_t i = 0; i < total.size(); ++i) out[i] = trials ? total[i] / trials : 0.0;
  return out;
}

TrialSums run_trials(std::int64_t trials, std::uint64_t seed, std::uint64_t tag, std::size_t width,
                     const TrialFn& fn) {
  TrialSums out;
  out.trials = std::max<std::int64_t>(trials, 0);
  const std::int64_t blocks = (out.trials + kTrialBlock - 1) / kTrialBlock;
  out.block_total.assign(blocks, std::vector<double>(width, 0.0));
  out.block_trials.assign(blocks, 0);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < blocks; ++b) {
    RandomStream rng(seed, tag, static_cast<std::uint64_t>(b));
    const std::int64_t count = std::min(kTrialBlock, out.trials - b * kTrialBlock);
    std::vector<double> row(width);
    auto& acc = out.block_total[b];
    for (std::int64_t t = 0; t < count; ++t) {
      std::fill(row.begin(), row.end(), 0.0);
      fn(rng, row);
      for (std::size_t i = 0; i < width; ++i) acc[i] += row[i];
    }
    out.block_trials[b] = count;
  }
  out.total = tree_sum(out.block_total, 0, out.block_total.size(), width);
  return out;
}

Estimate estimate(const TrialSums& sums, const std::function<double(const std::vector<double>&)>& statistic) {
  Estimate e;
  e.value = statistic(sums.means());
  std::vector<double> per_block;
  for (std::size_t b = 0; b < sums.block_total.size(); ++b) {
    if (sums.block_trials[b] != kTrialBlock) continue;
    std::vector<double> m(sums.block_total[b]);
    for (double& x : m) x /= static_cast<double>(kTrialBlock);
    per_block.push_back(statistic(m));
  }
  if (per_block.size() < 2) {
    e.std_err = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  double mean = 0.0;
  for (double x : per_block) mean += x;
  mean /= static_cast<double>(per_block.size());
  double var = 0.0;
  for (double x : per_block) var += (x - mean) * (x - mean);
  var /= static_cast<double>(per_block.size() - 1);
  e.std_err = std::sqrt(var / static_cast<double>(per_block.size()));
  return e;
}

Eigen::MatrixXcd draw_noise(Eigen::Index rows, Eigen::Index cols, double variance, RandomStream& rng) {
  Eigen::MatrixXcd out(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = rng.complex_normal(variance);
  }
  return out;
}

Eigen::MatrixXcd simulate_pilot_phase(const Scenario& s, const RisState& ris, const PilotPlan& plan,
                                      const ChannelSample& sample, const Eigen::MatrixXcd& ap_noise) {
  const Eigen::Index m_count = sample.aggregate.rows();
  const int k_count = plan.num_users();
  const double amp = std::sqrt(s.pilot_power * plan.pilot_length);
  // Received training block, one row per AP: pilots, surface noise, AP noise.
  const Eigen::MatrixXcd reflected_noise = ris.diagonal().asDiagonal() * sample.pilot_noise;
  Eigen::MatrixXcd received(m_count, plan.pilot_length);
  for (Eigen::Index m = 0; m < m_count; ++m) {
    received.row(m) = sample.ap_links[m].adjoint() * reflected_noise + ap_noise.row(m);
    for (int k = 0; k < k_count; ++k) {
      received.row(m) += amp * sample.aggregate(m, k) * plan.basis.col(plan.pilot_of[k]).adjoint();
    }
  }
  Eigen::MatrixXcd proj(m_count, k_count);
  for (int k = 0; k < k_count; ++k) {
    proj.col(k) = received * plan.basis.col(plan.pilot_of[k]) / amp;
  }
  return proj;
}

Eigen::VectorXcd simulate_data_phase(const Scenario& s, const RisState& ris, const ChannelSample& sample,
                                     const Eigen::VectorXcd& symbols, const Eigen::VectorXcd& ap_noise) {
  const Eigen::Index m_count = sample.aggregate.rows();
  const Eigen::VectorXcd reflected_noise = ris.diagonal().cwiseProduct(sample.data_noise);
  Eigen::VectorXcd y = std::sqrt(s.data_power) * (sample.aggregate * symbols) + ap_noise;
  for (Eigen::Index m = 0; m < m_count; ++m) y(m) += sample.ap_links[m].dot(reflected_noise);
  return y;
}

namespace {

// Per-trial statistics shared by the SINR oracle and the identity suite.
void suite_trial(const Scenario& s, const NetworkRealization& net, const RisState& ris, const PilotPlan& plan,
                 const EstimationStats& est, const SuiteLayout& lay, RandomStream& rng, std::span<double> row) {
  const int m_count = lay.aps;
  const int k_count = lay.users;
  const ChannelSample smp = sample_channels(s, net, ris, rng);
  const Eigen::MatrixXcd pilot_ap_noise = draw_noise(m_count, plan.pilot_length, s.ap_noise, rng);
  const Eigen::MatrixXcd proj = simulate_pilot_phase(s, ris, plan, smp, pilot_ap_noise);
  const Eigen::MatrixXcd qhat = estimate_channels(proj, est);
  const auto& q = smp.aggregate;

  Eigen::VectorXcd symbols(k_count);
  for (int k = 0; k < k_count; ++k) symbols(k) = rng.unit_phasor();
  const Eigen::VectorXcd data_ap_noise = draw_noise(m_count, 1, s.ap_noise, rng).col(0);
  const Eigen::VectorXcd y = simulate_data_phase(s, ris, smp, symbols, data_ap_noise);

  const Eigen::VectorXcd theta = ris.diagonal();
  // Surface noise seen by each AP: per pilot during training, one sample for data.
  const Eigen::MatrixXcd pilot_ris = theta.asDiagonal() * smp.pilot_noise;
  Eigen::MatrixXcd pilot_seen(m_count, plan.pilot_length);
  Eigen::VectorXcd data_seen(m_count);
  const Eigen::VectorXcd data_ris = theta.cwiseProduct(smp.data_noise);
  for (int m = 0; m < m_count; ++m) {
    pilot_seen.row(m) = smp.ap_links[m].adjoint() * pilot_ris;
    data_seen(m) = smp.ap_links[m].dot(data_ris);
  }
  const Eigen::MatrixXcd pilot_proj_noise = pilot_seen * plan.basis;  // column t: p_m s_t

  for (int m = 0; m < m_count; ++m) {
    for (int k = 0; k < k_count; ++k) {
      const double p2 = std::norm(q(m, k));
      row[lay.q_sq(m, k)] = p2;
      row[lay.q_fourth(m, k)] = p2 * p2;
      const int t = plan.pilot_of[k];
      row[lay.noise(m, k)] = std::norm(std::conj(pilot_proj_noise(m, t)) * q(m, k));
      if (lay.has_other_pilot) {
        const int other = (t + 1) % plan.pilot_length;
        row[lay.noise_other(m, k)] = std::norm(std::conj(pilot_proj_noise(m, other)) * q(m, k));
      }
      const cd e = q(m, k) - qhat(m, k);
      const cd orth = std::conj(qhat(m, k)) * e;
      const cd g = std::conj(qhat(m, k)) * q(m, k);
      row[lay.est(m, k, kProj)] = std::norm(proj(m, k));
      row[lay.est(m, k, kEstSq)] = std::norm(qhat(m, k));
      row[lay.est(m, k, kErrSq)] = std::norm(e);
      row[lay.est(m, k, kOrthRe)] = orth.real();
      row[lay.est(m, k, kOrthIm)] = orth.imag();
      row[lay.est(m, k, kGainRe)] = g.real();
      row[lay.est(m, k, kGainIm)] = g.imag();
    }
  }
  if (lay.has_cross) {
    row[lay.cross(0)] = std::norm(q(0, 0) * std::conj(q(1, 1)));
    row[lay.cross(1)] = std::norm(q(0, 0) * std::conj(q(1, 0)));
    row[lay.cross(2)] = std::norm(q(0, 0) * std::conj(q(0, 1)));
    const cd four = std::conj(q(0, 0)) * q(0, 1) * std::conj(q(1, 1)) * q(1, 0);
    row[lay.cross(3)] = four.real();
    row[lay.cross(4)] = four.imag();
    const cd corr = q(0, 0) * std::conj(q(1, 0));
    row[lay.cross(5)] = corr.real();
    row[lay.cross(6)] = corr.imag();
  }
  for (int k = 0; k < k_count; ++k) {
    int p = 0;
    for (int m = 0; m < m_count; ++m) {
      for (int m2 = m + 1; m2 < m_count; ++m2, ++p) {
        const cd prod = std::conj(qhat(m, k)) * q(m, k) * std::conj(std::conj(qhat(m2, k)) * q(m2, k));
        row[lay.pair(k, p, 0)] = prod.real();
        row[lay.pair(k, p, 1)] = prod.imag();
      }
    }
    const Eigen::VectorXcd combiner = qhat.col(k);
    for (int j = 0; j < k_count; ++j) {
      const cd tj = combiner.dot(q.col(j));
      if (j == k) {
        row[lay.gain(k, 0)] = tj.real();
        row[lay.gain(k, 1)] = tj.imag();
      }
      row[lay.gain_sq(k, j)] = std::norm(tj);
    }
    row[lay.an(k)] = std::norm(combiner.dot(data_seen));
    row[lay.no(k)] = std::norm(combiner.dot(data_ap_noise));
    row[lay.mrc(k)] = std::norm(combiner.dot(y));
  }
  for (int m = 0; m < m_count; ++m) {
    row[lay.data_noise(m)] = std::norm(data_seen(m));
    row[lay.data_power(m)] = std::norm(y(m));
  }
  double out_power = data_ris.squaredNorm();
  for (int k = 0; k < k_count; ++k) out_power += s.data_power * theta.cwiseProduct(smp.user_links[k]).squaredNorm();
  row[lay.output_power()] = out_power;
}

SuiteLayout make_layout(const NetworkRealization& net, const PilotPlan& plan) {
  SuiteLayout lay{net.num_aps(), net.num_users(), plan.pilot_length, false, false};
  lay.has_cross = lay.aps >= 2 && lay.users >= 2;
  lay.has_other_pilot = plan.pilot_length >= 2;
  return lay;
}

// Groups from column means (rho_u applied); k fixed.
SinrGroups groups_from_means(const Scenario& s, const SuiteLayout& lay, const std::vector<double>& mu, int k) {
  SinrGroups g;
  const double re = mu[lay.gain(k, 0)];
  const double im = mu[lay.gain(k, 1)];
  g.desired = s.data_power * (re * re + im * im);
  g.uncertainty = s.data_power * mu[lay.gain_sq(k, k)] - g.desired;
  g.interference.assign(lay.users, 0.0);
  for (int j = 0; j < lay.users; ++j) {
    if (j != k) g.interference[j] = s.data_power * mu[lay.gain_sq(k, j)];
  }
  g.ris_noise = mu[lay.an(k)];
  g.ap_noise = mu[lay.no(k)];
  const double den = g.denominator();
  g.sinr = den > 0.0 ? g.desired / den : 0.0;
  return g;
}

}  // namespace

std::vector<EmpiricalSinr> empirical_sinr_all(const Scenario& s, const NetworkRealization& net,
                                              const RisState& ris, const PilotPlan& plan, std::int64_t trials,
                                              std::uint64_t seed) {
  const SecondOrderStats st = compute_stats(s, net, ris);
  const EstimationStats est = compute_estimation(s, st, plan);
  const SuiteLayout lay = make_layout(net, plan);
  const TrialSums sums = run_trials(trials, seed, streams::kTrials, lay.width(),
                                    [&](RandomStream& rng, std::span<double> row) {
                                      suite_trial(s, net, ris, plan, est, lay, rng, row);
                                    });
  std::vector<EmpiricalSinr> out(lay.users);
  for (int k = 0; k < lay.users; ++k) {
    auto& r = out[k];
    r.low_confidence = trials < kMinAuthoritativeTrials;
    r.groups = groups_from_means(s, lay, sums.means(), k);
    auto field = [&](auto pick) {
      return estimate(sums, [&](const auto& mu) { return pick(groups_from_means(s, lay, mu, k)); }).std_err;
    };
    r.std_err.desired = field([](const SinrGroups& g) { return g.desired; });
    r.std_err.uncertainty = field([](const SinrGroups& g) { return g.uncertainty; });
    r.std_err.ris_noise = field([](const SinrGroups& g) { return g.ris_noise; });
    r.std_err.ap_noise = field([](const SinrGroups& g) { return g.ap_noise; });
    r.std_err.sinr = field([](const SinrGroups& g) { return g.sinr; });
    r.std_err.interference.assign(lay.users, 0.0);
    for (int j = 0; j < lay.users; ++j) {
      if (j != k) r.std_err.interference[j] = field([j](const SinrGroups& g) { return g.interference[j]; });
    }
  }
  return out;
}

EmpiricalSinr empirical_sinr(const Scenario& s, const NetworkRealization& net, const RisState& ris,
                             const PilotPlan& plan, int k, std::int64_t trials, std::uint64_t seed) {
  return empirical_sinr_all(s, net, ris, plan, trials, seed).at(k);
}

bool IdentityReport::all_pass() const {
  return std::none_of(rows.begin(), rows.end(), [](const IdentityRow& r) { return r.status == RowStatus::kFail; });
}

const char* status_name(RowStatus s) {
  switch (s) {
    case RowStatus::kPass:
      return "pass";
    case RowStatus::kFail:
      return "fail";
    case RowStatus::kInfo:
      return "info";
  }
  return "info";
}

const std::vector<std::string>& checked_quantities() {
  static const std::vector<std::string> names = {
      "wishart",          "second_moment",      "fourth_moment",         "cross_moment_disjoint",
      "cross_moment_shared_user", "cross_moment_shared_ap", "four_product_moment", "uncorrelated_aps",
      "noise_moment",     "noise_moment_other_pilot", "pilot_projection_power", "estimate_power",
      "error_power",      "nmse",               "orthogonality",         "gain_cross_covariance",
      "sinr_desired",     "sinr_uncertainty",   "sinr_interference",     "sinr_ris_noise",
      "sinr_ap_noise",    "sinr",               "mrc_output_power",      "data_ris_noise_power",
      "data_received_power", "aris_output_power",
  };
  return names;
}

Estimate wishart_check(const Eigen::MatrixXd& covariance, const Eigen::MatrixXcd& weight, std::int64_t trials,
                       std::uint64_t seed) {
  const Eigen::Index n = covariance.rows();
  const Eigen::MatrixXd factor = psd_factor(covariance);
  const Eigen::MatrixXcd r = covariance.cast<cd>();
  const Eigen::MatrixXcd expected = r * weight * r + (weight * r).trace() * r;
  const auto width = static_cast<std::size_t>(2 * n * n);
  const TrialSums sums = run_trials(trials, seed, streams::kMoments, width, [&](RandomStream& rng, std::span<double> row) {
    const Eigen::VectorXcd x = sample_correlated_vector(factor, 1.0, rng);
    const cd quad = x.dot(weight * x);  // x^H A x
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const cd v = x(i) * quad * std::conj(x(j));
        row[2 * (j * n + i)] = v.real();
        row[2 * (j * n + i) + 1] = v.imag();
      }
    }
  });
  return estimate(sums, [&](const std::vector<double>& mu) {
    Eigen::MatrixXcd mean(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) mean(i, j) = cd(mu[2 * (j * n + i)], mu[2 * (j * n + i) + 1]);
    }
    return (mean - expected).norm() / expected.norm();
  });
}

IdentityReport verify_moment_identities(const Scenario& s, const NetworkRealization& net, const RisState& ris,
                                        const PilotPlan& plan, std::uint64_t seed, const SuiteOptions& opt) {
  const SecondOrderStats st = compute_stats(s, net, ris);
  const EstimationStats est = compute_estimation(s, st, plan);
  const SuiteLayout lay = make_layout(net, plan);
  const std::int64_t n = opt.trials;
  IdentityReport rep;
  rep.low_confidence = n < kMinAuthoritativeTrials;

  const TrialSums sums = run_trials(n, seed, streams::kTrials, lay.width(),
                                    [&](RandomStream& rng, std::span<double> row) {
                                      suite_trial(s, net, ris, plan, est, lay, rng, row);
                                    });
  const std::vector<double> mu = sums.means();

  auto add = [&](std::string name, const std::function<double(const std::vector<double>&)>& stat, double analytic,
                 double tol, RowStatus kind = RowStatus::kPass) {
    const Estimate e = estimate(sums, stat);
    IdentityRow r{std::move(name), e.value, analytic, relative_error(e.value, analytic), e.std_err, tol, n, kind};
    if (kind != RowStatus::kInfo) r.status = r.rel_err <= tol ? RowStatus::kPass : RowStatus::kFail;
    rep.rows.push_back(std::move(r));
  };
  auto col = [](std::size_t i) { return [i](const std::vector<double>& v) { return v[i]; }; };
  auto idx = [](const char* base, std::initializer_list<int> ids) {
    std::string out = base;
    for (int i : ids) out += "[" + std::to_string(i) + "]";
    return out;
  };

  // Wishart identity on the AP-side correlation with a phase-dependent weight.
  {
    const Eigen::VectorXcd psi = reflection_diagonal(ris.phases, 1.0);
    const Eigen::MatrixXcd weight = psi.asDiagonal() * net.correlation.cast<cd>() * psi.conjugate().asDiagonal();
    const Estimate w = wishart_check(net.correlation, weight, n, seed);
    rep.rows.push_back({"wishart", w.value, 0.0, w.value, w.std_err, opt.moment_tolerance, n,
                        w.value <= opt.moment_tolerance ? RowStatus::kPass : RowStatus::kFail});
    const Estimate scalar = wishart_check(Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXcd::Ones(1, 1), n, seed + 1);
    rep.rows.push_back({"wishart_scalar", scalar.value, 0.0, scalar.value, scalar.std_err, opt.moment_tolerance, n,
                        scalar.value <= opt.moment_tolerance ? RowStatus::kPass : RowStatus::kFail});
  }

  for (int m = 0; m < lay.aps; ++m) {
    for (int k = 0; k < lay.users; ++k) {
      add(idx("second_moment", {m, k}), col(lay.q_sq(m, k)), st.kappa(m, k), opt.moment_tolerance);
      add(idx("fourth_moment", {m, k}), col(lay.q_fourth(m, k)), fourth_moment(st, m, k), opt.moment_tolerance);
    }
  }
  if (lay.has_cross) {
    add("cross_moment_disjoint", col(lay.cross(0)), cross_moment(st, 0, 1, 0, 1), opt.moment_tolerance);
    add("cross_moment_shared_user", col(lay.cross(1)), cross_moment(st, 0, 1, 0, 0), opt.moment_tolerance);
    add("cross_moment_shared_ap", col(lay.cross(2)), cross_moment(st, 0, 0, 0, 1), opt.moment_tolerance);
    if (st.gain > 0.0) {
      add("four_product_moment", col(lay.cross(3)), four_product_moment(st, 0, 1, 0, 1), opt.moment_tolerance);
    }
    // Correlation coefficient between two APs' channels to the same user.
    const std::size_t re = lay.cross(5), im = lay.cross(6), a = lay.q_sq(0, 0), b = lay.q_sq(1, 0);
    add("uncorrelated_aps",
        [=](const std::vector<double>& v) { return std::hypot(v[re], v[im]) / std::sqrt(v[a] * v[b]); }, 0.0, 0.01);
    rep.rows.back().rel_err = rep.rows.back().empirical;
    rep.rows.back().status = rep.rows.back().rel_err <= 0.01 ? RowStatus::kPass : RowStatus::kFail;
  }
  for (int m = 0; m < lay.aps; ++m) {
    for (int k = 0; k < lay.users; ++k) {
      add(idx("noise_moment", {m, k}), col(lay.noise(m, k)), st.noise_moment(m, k), opt.moment_tolerance);
      if (lay.has_other_pilot) {
        add(idx("noise_moment_other_pilot", {m, k}), col(lay.noise_other(m, k)), st.noise_moment(m, k),
            opt.moment_tolerance);
      }
    }
  }
  if (s.noise_moment == NoiseMomentForm::kGeneral) {
    Scenario alt = s;
    alt.noise_moment = NoiseMomentForm::kSimplified;
    const SecondOrderStats st_alt = compute_stats(alt, net, ris);
    add("noise_moment_shorthand[0][0]", col(lay.noise(0, 0)), st_alt.noise_moment(0, 0), opt.moment_tolerance,
        RowStatus::kInfo);
  }

  const double rho_tau = s.pilot_power * plan.pilot_length;
  for (int m = 0; m < lay.aps; ++m) {
    for (int k = 0; k < lay.users; ++k) {
      add(idx("pilot_projection_power", {m, k}), col(lay.est(m, k, kProj)),
          pilot_denominator(s, st, plan, m, k) / rho_tau, opt.estimation_tolerance);
      add(idx("estimate_power", {m, k}), col(lay.est(m, k, kEstSq)), est.variance(m, k), opt.estimation_tolerance);
      add(idx("error_power", {m, k}), col(lay.est(m, k, kErrSq)), st.kappa(m, k) - est.variance(m, k),
          opt.estimation_tolerance);
      const std::size_t err = lay.est(m, k, kErrSq), q2 = lay.q_sq(m, k);
      add(idx("nmse", {m, k}), [=](const std::vector<double>& v) { return v[err] / v[q2]; }, nmse(est, m, k),
          opt.estimation_tolerance);
      const std::size_t ore = lay.est(m, k, kOrthRe), oim = lay.est(m, k, kOrthIm), e2 = lay.est(m, k, kEstSq);
      add(idx("orthogonality", {m, k}),
          [=](const std::vector<double>& v) { return std::hypot(v[ore], v[oim]) / std::sqrt(v[e2] * v[err]); }, 0.0,
          0.01);
      rep.rows.back().rel_err = rep.rows.back().empirical;
      rep.rows.back().status = rep.rows.back().rel_err <= 0.01 ? RowStatus::kPass : RowStatus::kFail;
    }
  }

  for (int k = 0; k < lay.users; ++k) {
    int p = 0;
    for (int m = 0; m < lay.aps; ++m) {
      for (int m2 = m + 1; m2 < lay.aps; ++m2, ++p) {
        const std::size_t pr = lay.pair(k, p, 0), g1r = lay.est(m, k, kGainRe), g1i = lay.est(m, k, kGainIm),
                          g2r = lay.est(m2, k, kGainRe), g2i = lay.est(m2, k, kGainIm);
        auto cov = [=](const std::vector<double>& v) {
          return v[pr] - (v[g1r] * v[g2r] + v[g1i] * v[g2i]);
        };
        if (st.gain == 0.0) continue;  // both sides vanish identically
        add(idx("gain_cross_covariance", {m, m2, k}), cov, gain_cross_covariance(s, st, est, plan, m, m2, k),
            opt.moment_tolerance);
        add(idx("gain_cross_covariance_shorthand", {m, m2, k}), cov,
            gain_cross_covariance_shorthand(st, est, plan, m, m2, k), opt.moment_tolerance, RowStatus::kInfo);
      }
    }
  }

  for (int k = 0; k < lay.users; ++k) {
    const SinrGroups g = sinr_groups(s, st, est, plan, k);
    auto grp = [&, k](auto pick) {
      return [&, k, pick](const std::vector<double>& v) { return pick(groups_from_means(s, lay, v, k)); };
    };
    add(idx("sinr_desired", {k}), grp([](const SinrGroups& e) { return e.desired; }), g.desired, opt.sinr_tolerance);
    add(idx("sinr_uncertainty", {k}), grp([](const SinrGroups& e) { return e.uncertainty; }), g.uncertainty,
        opt.sinr_tolerance);
    for (int j = 0; j < lay.users; ++j) {
      if (j == k) continue;
      add(idx("sinr_interference", {k, j}), grp([j](const SinrGroups& e) { return e.interference[j]; }),
          g.interference[j], opt.sinr_tolerance);
    }
    add(idx("sinr_ris_noise", {k}), grp([](const SinrGroups& e) { return e.ris_noise; }), g.ris_noise,
        opt.sinr_tolerance);
    add(idx("sinr_ap_noise", {k}), grp([](const SinrGroups& e) { return e.ap_noise; }), g.ap_noise,
        opt.sinr_tolerance);
    add(idx("sinr", {k}), grp([](const SinrGroups& e) { return e.sinr; }), g.sinr, opt.sinr_tolerance);
    add(idx("sinr_shorthand", {k}), grp([](const SinrGroups& e) { return e.sinr; }),
        sinr_shorthand(s, st, est, plan, k).sinr, opt.sinr_tolerance, RowStatus::kInfo);
    add(idx("mrc_output_power", {k}), col(lay.mrc(k)), g.desired + g.denominator(), opt.sinr_tolerance);
  }

  for (int m = 0; m < lay.aps; ++m) {
    const double an = s.ris_noise * st.gain * st.gain * st.ap_trace(m);
    add(idx("data_ris_noise_power", {m}), col(lay.data_noise(m)), an, opt.power_tolerance);
    add(idx("data_received_power", {m}), col(lay.data_power(m)),
        s.data_power * st.kappa.row(m).sum() + an + s.ap_noise, opt.power_tolerance);
  }
  add("aris_output_power", col(lay.output_power()), aris_output_power(s, net.ris_user_gain, ris.gain),
      opt.power_tolerance);
  return rep;
}

}  // namespace cfris
