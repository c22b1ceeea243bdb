// Copyright 2026 The amris Authors.
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


// Hybrid learners. Each inner agent owns a state encoder shared by a
// factored-head DQN (discrete codes) and a tanh-squashed Gaussian PPO actor
// with its critic (continuous settings). A separate PPO meta-controller nudges
// the eight learning hyperparameters every few slots.

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amris/config.hpp"
#include "amris/environment.hpp"
#include "amris/neural.hpp"
#include "amris/rng.hpp"

namespace amris {

using nn::Mat;

struct HyperparamSet {
  static constexpr int kCount = 8;
  enum Index : int { kGammaD = 0, kEtaD, kSigmaTh, kTauQ, kGammaC, kEtaC1, kEtaC2, kEpsilon };

  std::array<double, kCount> values{};

  static const std::array<const char*, kCount>& names();
  static const std::array<std::pair<double, double>, kCount>& ranges();
  static HyperparamSet midpoint();

  double operator[](int c) const { return values[c]; }
  double& operator[](int c) { return values[c]; }
  bool in_range() const;
};

using HyperDelta = std::array<double, HyperparamSet::kCount>;

// xi <- max(0, xi + delta), then clamped into the allowed range.
HyperparamSet meta_apply(const HyperparamSet& h, const HyperDelta& deltas);

// Mean EE of the window minus lambda * sum_c nu_c, where
//   nu_c = ((xi_c - mean of the last t_xi values of c) / (|delta_c| + eps_xi))^2.
// history holds earlier values, oldest first; missing entries are padded with
// `current`.
double meta_reward(std::span<const double> ee_window, std::span<const HyperparamSet> history,
                   const HyperparamSet& current, const HyperDelta& deltas, double lambda,
                   int t_xi, double eps_xi);

// r + gamma * V(s') - V(s)
double ppo_advantage(double r, double v_s, double v_next, double gamma);

// min(rho A, clip(rho, 1 - eps, 1 + eps) A) with rho = exp(logp_new - logp_old).
double ppo_surrogate(double logp_new, double logp_old, double advantage, double eps);

// (V(s) - (r + gamma V(s')))^2
double ppo_value_loss(double v_s, double r, double v_next, double gamma);

// Sum over heads of the per-head maximum of a 1 x sum(head_sizes) row.
double factored_max_sum(const Mat& q_row, std::span<const int> head_sizes);

// Per-head argmax, lowest index on ties.
std::vector<int> factored_argmax(const Mat& q_row, std::span<const int> head_sizes);

// Graph pieces shared by the inner agents and the meta-controller.
//   log N(u; mu, exp(log_std)) summed over columns, minus the tanh Jacobian.
nn::Var gaussian_tanh_logp(nn::Graph& g, nn::Var mu, nn::Var log_std, const Mat& u);
//   -mean(min(rho A, clip(rho) A))
nn::Var clipped_policy_loss(nn::Graph& g, nn::Var logp_new, const Mat& logp_old,
                            const Mat& advantage, double eps);
//   mean((v - target)^2)
nn::Var squared_error_loss(nn::Graph& g, nn::Var v, const Mat& target);
//   mean((sum(q * mask, cols) - y)^2)
nn::Var dqn_loss(nn::Graph& g, nn::Var q, const Mat& action_mask, const Mat& y);

struct ReplayEntry {
  Mat state;
  std::vector<int> action;
  double reward = 0.0;
  Mat next_state;
};

// FIFO ring with uniform sampling without replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity = 128) : capacity_(capacity) {}
  void push(ReplayEntry e);
  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }
  const ReplayEntry& at(int i) const { return items_.at(i); }
  std::vector<const ReplayEntry*> sample(int n, Rng& rng) const;

 private:
  int capacity_;
  std::deque<ReplayEntry> items_;
};

struct PpoSample {
  Mat state;
  Mat u;  // pre-squash action, 1 x A
  double logp_old = 0.0;
  double reward = 0.0;
  Mat next_state;
};

struct PpoLosses {
  double policy = 0.0;
  double value = 0.0;
};

struct AgentOptions {
  bool attention = true;
  int d_k = 64;
  int num_heads = 4;
  int attention_out = 16;
  int hidden = 128;
  int hidden_layers = 2;
  double dropout = 0.0;
  int replay_capacity = 128;
  int batch_size = 64;
  int t_up = 10;
  int ppo_epochs = 4;
  double log_std_init = -1.2039728043259361;
  double grad_clip = 10.0;
  bool normalize_tokens = true;

  static AgentOptions from_config(const ScenarioConfig& cfg);
};

struct ContinuousSample {
  Mat u;                       // 1 x A, pre-squash
  std::vector<double> action;  // tanh(u)
  double logp = 0.0;
};

class HybridAgent {
 public:
  HybridAgent(int agent_id, ActionSpec spec, const AgentOptions& opts, std::uint64_t seed);

  int agent_id() const { return agent_id_; }
  const ActionSpec& spec() const { return spec_; }

  // Scales a token matrix to unit RMS entry; zero stays zero.
  Mat preprocess(const Mat& tokens) const;

  Mat q_values(const Mat& tokens);
  Mat target_q_values(const Mat& tokens);
  std::vector<int> select_discrete(const Mat& tokens, double sigma_th);
  // Greedy heads given a uniform draw; exposed for deterministic tests.
  std::vector<int> select_discrete_with(const Mat& tokens, double draw, double sigma_th);

  Mat policy_mean(const Mat& tokens);
  double value(const Mat& tokens);
  ContinuousSample sample_continuous(const Mat& tokens);
  double log_prob(const Mat& tokens, const Mat& u);

  double dqn_target(double reward, const Mat& next_tokens, double gamma_d);
  // One SGD step on the given batch; returns the loss before the step.
  double dqn_update_batch(std::span<const ReplayEntry* const> batch, double gamma_d, double eta_d);
  // Samples from the buffer; no-op until it holds a full batch. Also counts
  // steps and performs the soft target update every t_up of them.
  std::optional<double> dqn_train_step(const HyperparamSet& h);
  void soft_update_targets(double tau);

  void remember(ReplayEntry e) { buffer_.push(std::move(e)); }
  void record(PpoSample s) { trajectory_.push_back(std::move(s)); }
  const ReplayBuffer& buffer() const { return buffer_; }
  const std::vector<PpoSample>& trajectory() const { return trajectory_; }

  // K epochs over the stored trajectory, then clears it. Empty trajectory is
  // a no-op.
  PpoLosses ppo_update(const HyperparamSet& h);
  PpoLosses ppo_update_on(std::span<const PpoSample> batch, const HyperparamSet& h);

  nn::ParamRefs online_parameters();
  nn::ParamRefs target_parameters();
  nn::ParamRefs all_parameters();
  nn::ParamRefs dqn_parameters();
  nn::ParamRefs policy_parameters();
  nn::ParamRefs value_parameters();

  nn::StateEncoder encoder;
  nn::StateEncoder encoder_target;
  nn::Mlp q_net;
  nn::Mlp q_target;
  nn::Mlp policy;
  nn::Mlp critic;
  nn::Parameter log_std;

 private:
  nn::Var encode(nn::Graph& g, const Mat& tokens, bool training);
  nn::Var encode_target(nn::Graph& g, const Mat& tokens);
  void apply(nn::ParamRefs params, double lr);

  int agent_id_;
  ActionSpec spec_;
  AgentOptions opts_;
  ReplayBuffer buffer_;
  std::vector<PpoSample> trajectory_;
  Rng explore_rng_;
  Rng replay_rng_;
  Rng dropout_rng_;
  int dqn_steps_ = 0;
};

struct MetaOptions {
  bool enabled = true;
  double fraction = 1.0;
  double step_fraction = 0.05;
  int batch = 4;
  double lr = 1e-3;
  double gamma = 0.9;
  double clip = 0.2;
  int epochs = 4;
  int hidden = 128;
  int hidden_layers = 2;
  double log_std_init = -1.2039728043259361;
  double lambda = 3e-4;
  double eps_xi = 1e-6;
  int t_xi = 5;
  double grad_clip = 10.0;

  static MetaOptions from_config(const ScenarioConfig& cfg);
};

struct MetaSample {
  Mat state;  // normalized hyperparameters, 1 x 8
  Mat u;
  double logp_old = 0.0;
  double reward = 0.0;
  Mat next_state;
};

class MetaAgent {
 public:
  MetaAgent(const MetaOptions& opts, std::uint64_t seed);

  const HyperparamSet& current() const { return current_; }
  const std::vector<int>& optimized() const { return optimized_; }
  int steps() const { return steps_; }
  double last_reward() const { return last_reward_; }

  // Closes the pending transition with the window's EE, trains when a batch
  // is complete, then picks and applies the next adjustment.
  const HyperparamSet& step(std::span<const double> ee_window);

  Mat normalized(const HyperparamSet& h) const;
  nn::ParamRefs parameters();

  nn::Mlp policy;
  nn::Mlp critic;
  nn::Parameter log_std;

 private:
  void train();

  MetaOptions opts_;
  HyperparamSet current_;
  std::vector<HyperparamSet> history_;
  std::vector<int> optimized_;
  std::vector<MetaSample> batch_;
  std::optional<MetaSample> pending_;
  double pending_penalty_ = 0.0;
  double last_reward_ = 0.0;
  Rng rng_;
  int steps_ = 0;
};

}  // namespace amris
