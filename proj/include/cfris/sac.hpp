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
#include <vector>

#include <Eigen/Dense>

#include "cfris/config.hpp"
#include "cfris/estimation.hpp"
#include "cfris/nets.hpp"
#include "cfris/perf.hpp"
#include "cfris/rng.hpp"
#include "cfris/scenario.hpp"

namespace cfris {

struct SacConfig {
  double lr = 1e-3;
  double discount = 0.99;
  double polyak = 0.005;
  double entropy_coeff = 0.2;
  int batch = 64;
  int buffer_capacity = 32000;
  int hidden = 64;
  double exploration_noise = 0.1;
  int episode_len = 400;
  int episodes = 2000;
  bool adam = false;
};

/// Throws ConfigError on invalid values.
void validate(const SacConfig& c);

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;  // squashed, in (-1, 1)
  double reward = 0.0;
  Eigen::VectorXd next_state;
};

/// FIFO ring buffer with uniform sampling without replacement per batch.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Indices of `count` distinct stored transitions.
  std::vector<std::size_t> sample_indices(std::size_t count, RandomStream& rng) const;
  const Transition& at(std::size_t i) const { return items_[i]; }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

/// Squashed Gaussian policy output for one state and one fixed noise draw.
struct PolicyOutput {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_std;      // clamped
  Eigen::VectorXd raw_log_std;  // before clamping
  Eigen::VectorXd noise;        // eps, std = exploration noise
  Eigen::VectorXd pre_squash;   // u = mean + std * eps
  Eigen::VectorXd action;       // tanh(u)
  double log_prob = 0.0;
};

/// Reparameterized evaluation with explicit eps.
PolicyOutput policy_evaluate(const Mlp& policy, const Eigen::VectorXd& state, const Eigen::VectorXd& eps,
                             double noise_std, Mlp::Cache* cache = nullptr);
/// Draws eps ~ N(0, noise_std^2) per dimension and evaluates.
PolicyOutput policy_sample(const Mlp& policy, const Eigen::VectorXd& state, double noise_std, RandomStream& rng);

/// phase = pi * (action + 1) wrapped into [0, 2 pi).
Eigen::VectorXd action_to_phases(const Eigen::VectorXd& action);

/// Environment over surface phases on one fixed realization. The observation
/// is [phases / 2 pi, gamma_mk / gamma_ref]; the reward is the closed-form sum
/// SE of the phases.
class RisEnv {
 public:
  RisEnv(Scenario s, NetworkRealization net);

  int state_dim() const { return num_elements() + scenario_.num_aps * scenario_.num_users; }
  int action_dim() const { return num_elements(); }
  int num_elements() const { return scenario_.num_elements(); }
  double gain() const { return gain_; }
  const Scenario& scenario() const { return scenario_; }
  const NetworkRealization& realization() const { return net_; }
  const PilotPlan& plan() const { return plan_; }

  double sum_se(const Eigen::VectorXd& phases) const;
  Eigen::VectorXd observe(const Eigen::VectorXd& phases) const;
  Eigen::VectorXd random_phases(RandomStream& rng) const;

 private:
  Scenario scenario_;
  NetworkRealization net_;
  PilotPlan plan_;
  double gain_ = 0.0;
  double gamma_ref_ = 1.0;
};

struct SacNets {
  Mlp value, value_target, q1, q2, policy;
};

SacNets make_nets(int state_dim, int action_dim, int hidden, std::uint64_t seed);

/// One minibatch with the fixed policy noise used for its fresh actions.
struct Batch {
  std::vector<const Transition*> items;
  std::vector<Eigen::VectorXd> eps;
};

/// Losses of one update; gradients are written to the matching vector (which
/// is resized and zeroed).
double value_loss(const SacNets& nets, const Batch& b, double noise_std, Eigen::VectorXd* grad);
double q_loss(const SacNets& nets, const Mlp& q, const Batch& b, double discount, Eigen::VectorXd* grad);
double policy_loss(const SacNets& nets, const Batch& b, double noise_std, Eigen::VectorXd* grad);

class TrainingDivergence : public std::runtime_error {
 public:
  TrainingDivergence(const std::string& what, int episode, int step)
      : std::runtime_error(what), episode(episode), step(step) {}
  int episode;
  int step;
};

struct TrainResult {
  std::vector<double> episode_reward;  // sum over steps of the sum SE
  Eigen::VectorXd best_phases;
  double best_sum_se = 0.0;
  double equal_phase_sum_se = 0.0;
  SacNets nets;
};

TrainResult train(const RisEnv& env, const SacConfig& cfg, std::uint64_t seed);

/// Versioned JSON checkpoint of the networks and best phases.
void save_checkpoint(const std::string& path, const TrainResult& r, const SacConfig& cfg);
/// Returns the stored best phase vector.
Eigen::VectorXd load_checkpoint_phases(const std::string& path);

}  // namespace cfris
