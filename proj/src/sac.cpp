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

#include "cfris/sac.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "cfris/ris.hpp"
#include "cfris/streams.hpp"
#include "json.hpp"

namespace cfris {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// log(1 - tanh(u)^2) without cancellation for large |u|.
double log_one_minus_tanh_sq(double u) { return 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u)); }

Eigen::VectorXd concat(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void validate(const SacConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.lr > 0.0, "lr must be positive");
  require(c.discount > 0.0 && c.discount <= 1.0, "discount must lie in (0, 1]");
  require(c.polyak > 0.0 && c.polyak <= 1.0, "polyak must lie in (0, 1]");
  require(c.entropy_coeff > 0.0, "entropy_coeff must be positive");
  require(c.batch > 0 && c.buffer_capacity >= c.batch, "batch must be positive and fit in the buffer");
  require(c.hidden > 0, "hidden must be positive");
  require(c.exploration_noise > 0.0, "exploration_noise must be positive");
  require(c.episode_len > 0, "episode_len must be positive");
  require(c.episodes >= 0, "episodes must be non-negative");
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, RandomStream& rng) const {
  const std::size_t n = items_.size();
  if (count > n) throw std::invalid_argument("ReplayBuffer: batch larger than contents");
  // Floyd's algorithm: `count` distinct indices, uniform over subsets.
  std::vector<std::size_t> picked;
  picked.reserve(count);
  for (std::size_t j = n - count; j < n; ++j) {
    const std::size_t t = static_cast<std::size_t>(rng.uniform() * static_cast<double>(j + 1));
    const std::size_t cand = std::min(t, j);
    if (std::find(picked.begin(), picked.end(), cand) == picked.end()) {
      picked.push_back(cand);
    } else {
      picked.push_back(j);
    }
  }
  return picked;
}

PolicyOutput policy_evaluate(const Mlp& policy, const Eigen::VectorXd& state, const Eigen::VectorXd& eps,
                             double noise_std, Mlp::Cache* cache) {
  const Eigen::VectorXd out = policy.forward(state, cache);
  const Eigen::Index n = out.size() / 2;
  PolicyOutput p;
  p.mean = out.head(n);
  p.raw_log_std = out.tail(n);
  p.log_std = p.raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  p.noise = eps;
  p.pre_squash = p.mean + p.log_std.array().exp().matrix().cwiseProduct(eps);
  p.action = p.pre_squash.array().tanh().matrix();
  const double log_norm = std::log(noise_std) + 0.5 * std::log(2.0 * std::numbers::pi);
  double lp = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = eps(i) / noise_std;
    lp += -0.5 * z * z - p.log_std(i) - log_norm - log_one_minus_tanh_sq(p.pre_squash(i));
  }
  p.log_prob = lp;
  return p;
}

PolicyOutput policy_sample(const Mlp& policy, const Eigen::VectorXd& state, double noise_std, RandomStream& rng) {
  Eigen::VectorXd eps(policy.outputs() / 2);
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = noise_std * rng.normal();
  return policy_evaluate(policy, state, eps, noise_std);
}

Eigen::VectorXd action_to_phases(const Eigen::VectorXd& action) {
  Eigen::VectorXd out(action.size());
  for (Eigen::Index i = 0; i < action.size(); ++i) out(i) = wrap_phase(std::numbers::pi * (action(i) + 1.0));
  return out;
}

RisEnv::RisEnv(Scenario s, NetworkRealization net) : scenario_(std::move(s)), net_(std::move(net)) {
  plan_ = assign_pilots(scenario_.num_users, scenario_.pilot_length, scenario_.pilot_basis);
  gain_ = amplitude_gain(scenario_, net_.ris_user_gain).value;
  const Performance ref = evaluate(scenario_, net_, plan_, RisState{Eigen::VectorXd::Zero(num_elements()), gain_});
  const double top = ref.est.variance.maxCoeff();
  gamma_ref_ = top > 0.0 ? top : 1.0;
}

double RisEnv::sum_se(const Eigen::VectorXd& phases) const {
  return evaluate(scenario_, net_, plan_, RisState{phases, gain_}).sum_se;
}

Eigen::VectorXd RisEnv::observe(const Eigen::VectorXd& phases) const {
  const Performance p = evaluate(scenario_, net_, plan_, RisState{phases, gain_});
  Eigen::VectorXd obs(state_dim());
  obs.head(num_elements()) = phases / (2.0 * std::numbers::pi);
  const Eigen::MatrixXd& g = p.est.variance;
  Eigen::Index at = num_elements();
  for (Eigen::Index m = 0; m < g.rows(); ++m) {
    for (Eigen::Index k = 0; k < g.cols(); ++k) obs(at++) = g(m, k) / gamma_ref_;
  }
  return obs;
}

Eigen::VectorXd RisEnv::random_phases(RandomStream& rng) const {
  Eigen::VectorXd ph(num_elements());
  for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = 2.0 * std::numbers::pi * rng.uniform();
  return ph;
}

SacNets make_nets(int state_dim, int action_dim, int hidden, std::uint64_t seed) {
  SacNets n{Mlp(state_dim, hidden, 1), Mlp(state_dim, hidden, 1), Mlp(state_dim + action_dim, hidden, 1),
            Mlp(state_dim + action_dim, hidden, 1), Mlp(state_dim, hidden, 2 * action_dim)};
  RandomStream r0(seed, streams::kNetInit, 0), r1(seed, streams::kNetInit, 1), r2(seed, streams::kNetInit, 2),
      r3(seed, streams::kNetInit, 3);
  n.value.initialize(r0);
  n.value_target = n.value;
  n.q1.initialize(r1);
  n.q2.initialize(r2);
  n.policy.initialize(r3);
  return n;
}

double value_loss(const SacNets& nets, const Batch& b, double noise_std, Eigen::VectorXd* grad) {
  if (grad) grad->setZero(nets.value.num_params());
  const double scale = 1.0 / static_cast<double>(b.items.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < b.items.size(); ++i) {
    const Eigen::VectorXd& s = b.items[i]->state;
    const PolicyOutput po = policy_evaluate(nets.policy, s, b.eps[i], noise_std);
    const Eigen::VectorXd sa = concat(s, po.action);
    const double q = std::min(nets.q1.forward(sa)(0), nets.q2.forward(sa)(0));
    Mlp::Cache cache;
    const double v = nets.value.forward(s, &cache)(0);
    const double diff = v - (q - po.log_prob);
    loss += 0.5 * diff * diff * scale;
    if (grad) nets.value.backward(cache, Eigen::VectorXd::Constant(1, diff * scale), *grad);
  }
  return loss;
}

double q_loss(const SacNets& nets, const Mlp& q, const Batch& b, double discount, Eigen::VectorXd* grad) {
  if (grad) grad->setZero(q.num_params());
  const double scale = 1.0 / static_cast<double>(b.items.size());
  double loss = 0.0;
  for (const Transition* t : b.items) {
    const double target = t->reward + discount * nets.value_target.forward(t->next_state)(0);
    Mlp::Cache cache;
    const double pred = q.forward(concat(t->state, t->action), &cache)(0);
    const double diff = pred - target;
    loss += 0.5 * diff * diff * scale;
    if (grad) q.backward(cache, Eigen::VectorXd::Constant(1, diff * scale), *grad);
  }
  return loss;
}

double policy_loss(const SacNets& nets, const Batch& b, double noise_std, Eigen::VectorXd* grad) {
  if (grad) grad->setZero(nets.policy.num_params());
  const double scale = 1.0 / static_cast<double>(b.items.size());
  double loss = 0.0;
  Eigen::VectorXd scratch;
  for (std::size_t i = 0; i < b.items.size(); ++i) {
    const Eigen::VectorXd& s = b.items[i]->state;
    Mlp::Cache pcache;
    const PolicyOutput po = policy_evaluate(nets.policy, s, b.eps[i], noise_std, &pcache);
    const Eigen::VectorXd sa = concat(s, po.action);
    Mlp::Cache c1, c2;
    const double v1 = nets.q1.forward(sa, &c1)(0);
    const double v2 = nets.q2.forward(sa, &c2)(0);
    const bool first = v1 <= v2;
    loss += (po.log_prob - std::min(v1, v2)) * scale;
    if (!grad) continue;

    // dQ/da through the critic that attains the minimum.
    const Mlp& critic = first ? nets.q1 : nets.q2;
    scratch.setZero(critic.num_params());
    const Eigen::VectorXd dq_din = critic.backward(first ? c1 : c2, Eigen::VectorXd::Ones(1), scratch);
    const Eigen::Index n = po.action.size();
    const Eigen::VectorXd dq_da = dq_din.tail(n);

    Eigen::VectorXd dy(2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = po.action(j);
      const double jac = 1.0 - a * a;             // d tanh(u) / du
      const double spread = po.pre_squash(j) - po.mean(j);  // std * eps = du / dlog_std
      const double d_mean = 2.0 * a - dq_da(j) * jac;
      double d_log_std = -1.0 + 2.0 * a * spread - dq_da(j) * jac * spread;
      if (po.raw_log_std(j) < kLogStdMin || po.raw_log_std(j) > kLogStdMax) d_log_std = 0.0;
      dy(j) = d_mean * scale;
      dy(n + j) = d_log_std * scale;
    }
    nets.policy.backward(pcache, dy, *grad);
  }
  return loss;
}

TrainResult train(const RisEnv& env, const SacConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  TrainResult res;
  res.nets = make_nets(env.state_dim(), env.action_dim(), cfg.hidden, seed);
  SacNets& nets = res.nets;
  Optimizer opt_v(nets.value.num_params(), cfg.lr, cfg.adam);
  Optimizer opt_q1(nets.q1.num_params(), cfg.lr, cfg.adam);
  Optimizer opt_q2(nets.q2.num_params(), cfg.lr, cfg.adam);
  Optimizer opt_pi(nets.policy.num_params(), cfg.lr, cfg.adam);
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity));

  const int n = env.action_dim();
  res.equal_phase_sum_se = env.sum_se(Eigen::VectorXd::Zero(n));
  res.best_sum_se = -1.0;
  auto consider = [&](const Eigen::VectorXd& phases, double se) {
    if (se > res.best_sum_se) {
      res.best_sum_se = se;
      res.best_phases = phases;
    }
  };

  Eigen::VectorXd gv, gq1, gq2, gpi;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    RandomStream env_rng(seed, streams::kEnvReset, static_cast<std::uint64_t>(ep));
    RandomStream pol_rng(seed, streams::kPolicy, static_cast<std::uint64_t>(ep));
    RandomStream rep_rng(seed, streams::kReplay, static_cast<std::uint64_t>(ep));
    Eigen::VectorXd phases = env.random_phases(env_rng);
    consider(phases, env.sum_se(phases));
    Eigen::VectorXd state = env.observe(phases);
    double cumulative = 0.0;
    for (int step = 0; step < cfg.episode_len; ++step) {
      const PolicyOutput po = policy_sample(nets.policy, state, cfg.exploration_noise, pol_rng);
      const Eigen::VectorXd next_phases = action_to_phases(po.action);
      const double se = env.sum_se(next_phases);
      consider(next_phases, se);
      // The noise-free action is free to score and often the best candidate.
      const Eigen::VectorXd greedy = action_to_phases(po.mean.array().tanh().matrix());
      consider(greedy, env.sum_se(greedy));

      const Eigen::VectorXd next_state = env.observe(next_phases);
      buffer.push({state, po.action, se / cfg.entropy_coeff, next_state});
      cumulative += se;
      state = next_state;

      if (buffer.size() < static_cast<std::size_t>(cfg.batch)) continue;
      Batch batch;
      for (std::size_t idx : buffer.sample_indices(static_cast<std::size_t>(cfg.batch), rep_rng)) {
        batch.items.push_back(&buffer.at(idx));
      }
      batch.eps.resize(batch.items.size());
      for (auto& e : batch.eps) {
        e.resize(n);
        for (int j = 0; j < n; ++j) e(j) = cfg.exploration_noise * pol_rng.normal();
      }
      const double lv = value_loss(nets, batch, cfg.exploration_noise, &gv);
      const double l1 = q_loss(nets, nets.q1, batch, cfg.discount, &gq1);
      const double l2 = q_loss(nets, nets.q2, batch, cfg.discount, &gq2);
      const double lp = policy_loss(nets, batch, cfg.exploration_noise, &gpi);
      if (!finite(lv) || !finite(l1) || !finite(l2) || !finite(lp) || !gv.allFinite() || !gq1.allFinite() ||
          !gq2.allFinite() || !gpi.allFinite()) {
        throw TrainingDivergence("non-finite loss (value " + std::to_string(lv) + ", q1 " + std::to_string(l1) +
                                     ", q2 " + std::to_string(l2) + ", policy " + std::to_string(lp) + ")",
                                 ep, step);
      }
      opt_v.step(nets.value.params(), gv);
      opt_q1.step(nets.q1.params(), gq1);
      opt_q2.step(nets.q2.params(), gq2);
      opt_pi.step(nets.policy.params(), gpi);
      polyak_update(nets.value_target.params(), nets.value.params(), cfg.polyak);
    }
    res.episode_reward.push_back(cumulative);
  }
  if (res.best_phases.size() == 0) {
    res.best_phases = Eigen::VectorXd::Zero(n);
    res.best_sum_se = res.equal_phase_sum_se;
  }
  return res;
}

void save_checkpoint(const std::string& path, const TrainResult& r, const SacConfig& cfg) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  auto net = [&](const Mlp& m) {
    return nlohmann::json{{"inputs", m.inputs()}, {"hidden", m.hidden()}, {"outputs", m.outputs()},
                          {"params", vec(m.params())}};
  };
  nlohmann::json j;
  j["format"] = "cfris-sac";
  j["version"] = 1;
  j["hidden"] = cfg.hidden;
  j["best_sum_se"] = r.best_sum_se;
  j["best_phases"] = vec(r.best_phases);
  j["nets"] = {{"policy", net(r.nets.policy)}, {"value", net(r.nets.value)},
               {"value_target", net(r.nets.value_target)}, {"q1", net(r.nets.q1)}, {"q2", net(r.nets.q2)}};
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  f << j.dump(1) << '\n';
}

Eigen::VectorXd load_checkpoint_phases(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open checkpoint '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse checkpoint '" + path + "': " + e.what());
  }
  if (j.value("format", "") != "cfris-sac" || j.value("version", 0) != 1) {
    throw ConfigError("unsupported checkpoint '" + path + "'");
  }
  const auto phases = j.at("best_phases").get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(phases.data(), static_cast<Eigen::Index>(phases.size()));
}

}  // namespace cfris
