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


#include "amris/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace amris {

using nn::Graph;
using nn::ParamRefs;
using nn::Var;

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

std::vector<int> mlp_dims(int in, int hidden, int layers, int out) {
  std::vector<int> d{in};
  for (int l = 0; l < layers; ++l) d.push_back(hidden);
  d.push_back(out);
  return d;
}

void rename(ParamRefs params, const std::string& prefix) {
  for (nn::Parameter* p : params) p->name = prefix + p->name;
}

ParamRefs join(std::initializer_list<ParamRefs> parts) {
  ParamRefs out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Hyperparameters

const std::array<const char*, HyperparamSet::kCount>& HyperparamSet::names() {
  static const std::array<const char*, kCount> n = {"gamma_d", "eta_d", "sigma_th", "tau_q",
                                                    "gamma_c", "eta_c1", "eta_c2", "epsilon"};
  return n;
}

const std::array<std::pair<double, double>, HyperparamSet::kCount>& HyperparamSet::ranges() {
  static const std::array<std::pair<double, double>, kCount> r = {{{0.1, 0.99},
                                                                   {1e-4, 1e-2},
                                                                   {0.05, 0.4},
                                                                   {0.7, 0.95},
                                                                   {0.1, 0.99},
                                                                   {1e-4, 1e-2},
                                                                   {1e-4, 1e-2},
                                                                   {0.1, 0.3}}};
  return r;
}

HyperparamSet HyperparamSet::midpoint() {
  HyperparamSet h;
  for (int c = 0; c < kCount; ++c) h.values[c] = 0.5 * (ranges()[c].first + ranges()[c].second);
  return h;
}

bool HyperparamSet::in_range() const {
  for (int c = 0; c < kCount; ++c)
    if (!(values[c] >= ranges()[c].first && values[c] <= ranges()[c].second)) return false;
  return true;
}

HyperparamSet meta_apply(const HyperparamSet& h, const HyperDelta& deltas) {
  HyperparamSet out = h;
  for (int c = 0; c < HyperparamSet::kCount; ++c) {
    const auto [lo, hi] = HyperparamSet::ranges()[c];
    out[c] = std::clamp(std::max(0.0, h[c] + deltas[c]), lo, hi);
  }
  return out;
}

namespace {

double instability(std::span<const HyperparamSet> history, const HyperparamSet& current,
                   const HyperDelta& deltas, double lambda, int t_xi, double eps_xi) {
  double total = 0.0;
  for (int c = 0; c < HyperparamSet::kCount; ++c) {
    double acc = 0.0;
    for (int j = 0; j < t_xi; ++j) {
      const int idx = static_cast<int>(history.size()) - 1 - j;
      acc += idx >= 0 ? history[idx][c] : current[c];
    }
    const double dev = (current[c] - acc / t_xi) / (std::abs(deltas[c]) + eps_xi);
    total += lambda * dev * dev;
  }
  return total;
}

}  // namespace

double meta_reward(std::span<const double> ee_window, std::span<const HyperparamSet> history,
                   const HyperparamSet& current, const HyperDelta& deltas, double lambda,
                   int t_xi, double eps_xi) {
  double mean = 0.0;
  for (double e : ee_window) mean += e;
  if (!ee_window.empty()) mean /= static_cast<double>(ee_window.size());
  return mean - instability(history, current, deltas, lambda, t_xi, eps_xi);
}

// ---------------------------------------------------------------------------
// Scalar losses

double ppo_advantage(double r, double v_s, double v_next, double gamma) {
  return r + gamma * v_next - v_s;
}

double ppo_surrogate(double logp_new, double logp_old, double advantage, double eps) {
  const double rho = std::exp(logp_new - logp_old);
  return std::min(rho * advantage, std::clamp(rho, 1.0 - eps, 1.0 + eps) * advantage);
}

double ppo_value_loss(double v_s, double r, double v_next, double gamma) {
  const double d = v_s - (r + gamma * v_next);
  return d * d;
}

double factored_max_sum(const Mat& q_row, std::span<const int> head_sizes) {
  double s = 0.0;
  int off = 0;
  for (int n : head_sizes) {
    s += q_row.block(0, off, 1, n).maxCoeff();
    off += n;
  }
  return s;
}

std::vector<int> factored_argmax(const Mat& q_row, std::span<const int> head_sizes) {
  std::vector<int> out;
  int off = 0;
  for (int n : head_sizes) {
    int best = 0;
    for (int a = 1; a < n; ++a)
      if (q_row(0, off + a) > q_row(0, off + best)) best = a;
    out.push_back(best);
    off += n;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graph losses

Var gaussian_tanh_logp(Graph& g, Var mu, Var log_std, const Mat& u) {
  const Mat& m = g.value(mu);
  if (u.rows() != m.rows() || u.cols() != m.cols())
    throw nn::ShapeError("gaussian_tanh_logp: action shape mismatch");
  const Eigen::Index b = u.rows();
  const Eigen::Index a = u.cols();
  Var inv_std = g.exp(g.scale(log_std, -1.0));
  Var z = g.mul_row(g.sub(g.constant(u), mu), inv_std);
  Var quad = g.scale(g.row_sum(g.square(z)), -0.5);
  Var norm = g.matmul(g.constant(Mat::Ones(b, 1)), g.sum(log_std));
  Mat fixed(b, 1);
  for (Eigen::Index r = 0; r < b; ++r) {
    double jac = 0.0;
    for (Eigen::Index c = 0; c < a; ++c) {
      const double t = std::tanh(u(r, c));
      jac += std::log(1.0 - t * t + 1e-6);
    }
    fixed(r, 0) = -static_cast<double>(a) * kHalfLog2Pi - jac;
  }
  return g.add(g.sub(quad, norm), g.constant(std::move(fixed)));
}

Var clipped_policy_loss(Graph& g, Var logp_new, const Mat& logp_old, const Mat& advantage,
                        double eps) {
  Var ratio = g.exp(g.sub(logp_new, g.constant(logp_old)));
  Var adv = g.constant(advantage);
  Var obj = g.minimum(g.mul(ratio, adv), g.mul(g.clip(ratio, 1.0 - eps, 1.0 + eps), adv));
  return g.scale(g.mean(obj), -1.0);
}

Var squared_error_loss(Graph& g, Var v, const Mat& target) {
  return g.mean(g.square(g.sub(v, g.constant(target))));
}

Var dqn_loss(Graph& g, Var q, const Mat& action_mask, const Mat& y) {
  Var q_sa = g.row_sum(g.mul(q, g.constant(action_mask)));
  return squared_error_loss(g, q_sa, y);
}

// ---------------------------------------------------------------------------
// Replay

void ReplayBuffer::push(ReplayEntry e) {
  if (static_cast<int>(items_.size()) == capacity_) items_.pop_front();
  items_.push_back(std::move(e));
}

std::vector<const ReplayEntry*> ReplayBuffer::sample(int n, Rng& rng) const {
  const int size = static_cast<int>(items_.size());
  n = std::min(n, size);
  std::vector<int> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  for (int a = 0; a < n; ++a) {
    const int b = a + std::min(size - a - 1, static_cast<int>(uniform01(rng) * (size - a)));
    std::swap(idx[a], idx[b]);
  }
  std::vector<const ReplayEntry*> out;
  for (int a = 0; a < n; ++a) out.push_back(&items_[idx[a]]);
  return out;
}

// ---------------------------------------------------------------------------
// Inner agent

AgentOptions AgentOptions::from_config(const ScenarioConfig& c) {
  AgentOptions o;
  o.attention = c.attention;
  o.d_k = c.d_k;
  o.num_heads = c.num_heads;
  o.attention_out = c.attention_out;
  o.hidden = c.hidden;
  o.hidden_layers = c.hidden_layers;
  o.dropout = c.dropout;
  o.replay_capacity = c.replay_capacity;
  o.batch_size = c.batch_size;
  o.t_up = c.t_up;
  o.ppo_epochs = c.ppo_epochs;
  o.log_std_init = c.log_std_init;
  o.grad_clip = c.grad_clip;
  return o;
}

HybridAgent::HybridAgent(int agent_id, ActionSpec spec, const AgentOptions& opts,
                         std::uint64_t seed)
    : agent_id_(agent_id),
      spec_(std::move(spec)),
      opts_(opts),
      buffer_(opts.replay_capacity),
      explore_rng_(make_stream(seed, "exploration/" + std::to_string(agent_id))),
      replay_rng_(make_stream(seed, "replay/" + std::to_string(agent_id))),
      dropout_rng_(make_stream(seed, "dropout/" + std::to_string(agent_id))) {
  Rng init = make_stream(seed, "init/" + std::to_string(agent_id));
  encoder = nn::StateEncoder(spec_.num_tokens, spec_.token_dim, opts.attention, opts.d_k,
                             opts.num_heads, opts.attention_out, opts.dropout, init);
  const int d = encoder.output_dim();
  int heads = 0;
  for (int n : spec_.head_sizes) heads += n;
  const auto qd = mlp_dims(d, opts.hidden, opts.hidden_layers, heads);
  const auto pd = mlp_dims(d, opts.hidden, opts.hidden_layers, spec_.continuous_dim);
  const auto vd = mlp_dims(d, opts.hidden, opts.hidden_layers, 1);
  q_net = nn::Mlp(qd, init, "q");
  policy = nn::Mlp(pd, init, "pi");
  critic = nn::Mlp(vd, init, "v");
  log_std = nn::Parameter("pi.log_std",
                          Mat::Constant(1, spec_.continuous_dim, opts.log_std_init));
  encoder_target = encoder;
  q_target = q_net;
  rename(encoder_target.parameters(), "target.");
  rename(q_target.parameters(), "target.");
}

Mat HybridAgent::preprocess(const Mat& tokens) const {
  if (!opts_.normalize_tokens) return tokens;
  const double n = tokens.norm();
  if (!(n > 0.0)) return tokens;
  return tokens * (std::sqrt(static_cast<double>(tokens.size())) / n);
}

Var HybridAgent::encode(Graph& g, const Mat& tokens, bool training) {
  return encoder.encode(g, preprocess(tokens), training, &dropout_rng_);
}

Var HybridAgent::encode_target(Graph& g, const Mat& tokens) {
  return encoder_target.encode(g, preprocess(tokens), false, nullptr);
}

Mat HybridAgent::q_values(const Mat& tokens) {
  Graph g;
  return g.value(q_net.forward(g, encode(g, tokens, false)));
}

Mat HybridAgent::target_q_values(const Mat& tokens) {
  Graph g;
  return g.value(q_target.forward(g, encode_target(g, tokens)));
}

std::vector<int> HybridAgent::select_discrete_with(const Mat& tokens, double draw,
                                                   double sigma_th) {
  std::vector<int> out;
  if (draw >= sigma_th) {
    out = factored_argmax(q_values(tokens), spec_.head_sizes);
  } else {
    for (int n : spec_.head_sizes)
      out.push_back(std::min(n - 1, static_cast<int>(uniform01(explore_rng_) * n)));
  }
  for (std::size_t h = 0; h < out.size(); ++h)
    if (spec_.fixed[h] >= 0) out[h] = spec_.fixed[h];
  return out;
}

std::vector<int> HybridAgent::select_discrete(const Mat& tokens, double sigma_th) {
  const double draw = uniform01(explore_rng_);
  return select_discrete_with(tokens, draw, sigma_th);
}

Mat HybridAgent::policy_mean(const Mat& tokens) {
  Graph g;
  return g.value(policy.forward(g, encode(g, tokens, false)));
}

double HybridAgent::value(const Mat& tokens) {
  Graph g;
  return g.value(critic.forward(g, encode(g, tokens, false)))(0, 0);
}

ContinuousSample HybridAgent::sample_continuous(const Mat& tokens) {
  const Mat mu = policy_mean(tokens);
  std::normal_distribution<double> normal(0.0, 1.0);
  ContinuousSample s;
  s.u.resize(1, mu.cols());
  for (Eigen::Index c = 0; c < mu.cols(); ++c)
    s.u(0, c) = mu(0, c) + std::exp(log_std.value(0, c)) * normal(explore_rng_);
  for (Eigen::Index c = 0; c < mu.cols(); ++c) s.action.push_back(std::tanh(s.u(0, c)));
  s.logp = log_prob(tokens, s.u);
  return s;
}

double HybridAgent::log_prob(const Mat& tokens, const Mat& u) {
  Graph g;
  Var mu = policy.forward(g, encode(g, tokens, false));
  return g.value(gaussian_tanh_logp(g, mu, g.param(log_std), u))(0, 0);
}

double HybridAgent::dqn_target(double reward, const Mat& next_tokens, double gamma_d) {
  const Mat q = target_q_values(next_tokens);
  // Pinned heads contribute their pinned code's value.
  double s = 0.0;
  int off = 0;
  for (std::size_t h = 0; h < spec_.head_sizes.size(); ++h) {
    const int n = spec_.head_sizes[h];
    s += spec_.fixed[h] >= 0 ? q(0, off + spec_.fixed[h]) : q.block(0, off, 1, n).maxCoeff();
    off += n;
  }
  return reward + gamma_d * s;
}

void HybridAgent::apply(ParamRefs params, double lr) {
  if (opts_.grad_clip > 0.0) nn::clip_grad_norm(params, opts_.grad_clip);
  nn::sgd_step(params, lr);
}

double HybridAgent::dqn_update_batch(std::span<const ReplayEntry* const> batch, double gamma_d,
                                     double eta_d) {
  if (batch.empty()) return 0.0;
  const int b = static_cast<int>(batch.size());
  int width = 0;
  for (int n : spec_.head_sizes) width += n;
  Mat y(b, 1);
  Mat mask = Mat::Zero(b, width);
  for (int r = 0; r < b; ++r) {
    y(r, 0) = dqn_target(batch[r]->reward, batch[r]->next_state, gamma_d);
    int off = 0;
    for (std::size_t h = 0; h < spec_.head_sizes.size(); ++h) {
      mask(r, off + batch[r]->action[h]) = 1.0;
      off += spec_.head_sizes[h];
    }
  }
  ParamRefs params = dqn_parameters();
  nn::zero_grad(params);
  Graph g;
  std::vector<Var> rows;
  for (int r = 0; r < b; ++r) rows.push_back(encode(g, batch[r]->state, true));
  Var q = q_net.forward(g, g.concat_rows(rows));
  Var loss = dqn_loss(g, q, mask, y);
  g.backward(loss);
  apply(params, eta_d);
  return g.value(loss)(0, 0);
}

std::optional<double> HybridAgent::dqn_train_step(const HyperparamSet& h) {
  if (buffer_.size() < opts_.batch_size) return std::nullopt;
  const auto batch = buffer_.sample(opts_.batch_size, replay_rng_);
  const double loss = dqn_update_batch(batch, h[HyperparamSet::kGammaD], h[HyperparamSet::kEtaD]);
  if (++dqn_steps_ % opts_.t_up == 0) soft_update_targets(h[HyperparamSet::kTauQ]);
  return loss;
}

void HybridAgent::soft_update_targets(double tau) {
  nn::soft_update(online_parameters(), target_parameters(), tau);
}

PpoLosses HybridAgent::ppo_update(const HyperparamSet& h) {
  const PpoLosses l = ppo_update_on(trajectory_, h);
  trajectory_.clear();
  return l;
}

PpoLosses HybridAgent::ppo_update_on(std::span<const PpoSample> batch, const HyperparamSet& h) {
  PpoLosses out;
  if (batch.empty()) return out;
  const int b = static_cast<int>(batch.size());
  const double gamma = h[HyperparamSet::kGammaC];
  const double eps = h[HyperparamSet::kEpsilon];

  Mat adv(b, 1);
  Mat logp_old(b, 1);
  for (int r = 0; r < b; ++r) {
    adv(r, 0) = ppo_advantage(batch[r].reward, value(batch[r].state), value(batch[r].next_state),
                              gamma);
    logp_old(r, 0) = batch[r].logp_old;
  }

  for (int epoch = 0; epoch < opts_.ppo_epochs; ++epoch) {
    {
      ParamRefs params = policy_parameters();
      nn::zero_grad(params);
      Graph g;
      std::vector<Var> lp;
      for (int r = 0; r < b; ++r) {
        Var mu = policy.forward(g, encode(g, batch[r].state, false));
        lp.push_back(gaussian_tanh_logp(g, mu, g.param(log_std), batch[r].u));
      }
      Var loss = clipped_policy_loss(g, g.concat_rows(lp), logp_old, adv, eps);
      g.backward(loss);
      apply(params, h[HyperparamSet::kEtaC1]);
      if (epoch == 0) out.policy = g.value(loss)(0, 0);
    }
    {
      Mat target(b, 1);
      for (int r = 0; r < b; ++r) target(r, 0) = batch[r].reward + gamma * value(batch[r].next_state);
      ParamRefs params = value_parameters();
      nn::zero_grad(params);
      Graph g;
      std::vector<Var> vs;
      for (int r = 0; r < b; ++r) vs.push_back(critic.forward(g, encode(g, batch[r].state, true)));
      Var loss = squared_error_loss(g, g.concat_rows(vs), target);
      g.backward(loss);
      apply(params, h[HyperparamSet::kEtaC2]);
      if (epoch == 0) out.value = g.value(loss)(0, 0);
    }
  }
  return out;
}

ParamRefs HybridAgent::online_parameters() {
  return join({encoder.parameters(), q_net.parameters()});
}

ParamRefs HybridAgent::target_parameters() {
  return join({encoder_target.parameters(), q_target.parameters()});
}

ParamRefs HybridAgent::dqn_parameters() { return online_parameters(); }

ParamRefs HybridAgent::policy_parameters() {
  return join({encoder.parameters(), policy.parameters(), ParamRefs{&log_std}});
}

ParamRefs HybridAgent::value_parameters() {
  return join({encoder.parameters(), critic.parameters()});
}

ParamRefs HybridAgent::all_parameters() {
  return join({encoder.parameters(), q_net.parameters(), policy.parameters(), ParamRefs{&log_std},
               critic.parameters(), encoder_target.parameters(), q_target.parameters()});
}

// ---------------------------------------------------------------------------
// Meta-controller

MetaOptions MetaOptions::from_config(const ScenarioConfig& c) {
  MetaOptions o;
  o.enabled = c.meta;
  o.fraction = c.meta_fraction;
  o.step_fraction = c.meta_step_fraction;
  o.batch = c.meta_batch;
  o.lr = c.meta_lr;
  o.gamma = c.meta_gamma;
  o.clip = c.meta_clip;
  o.epochs = c.ppo_epochs;
  o.hidden = c.hidden;
  o.hidden_layers = c.hidden_layers;
  o.log_std_init = c.log_std_init;
  o.lambda = c.lambda_c;
  o.eps_xi = c.eps_xi;
  o.t_xi = c.t_xi;
  o.grad_clip = c.grad_clip;
  return o;
}

MetaAgent::MetaAgent(const MetaOptions& opts, std::uint64_t seed)
    : opts_(opts), current_(HyperparamSet::midpoint()), rng_(make_stream(seed, "meta")) {
  constexpr int n = HyperparamSet::kCount;
  Rng init = make_stream(seed, "init/meta");
  policy = nn::Mlp(mlp_dims(n, opts.hidden, opts.hidden_layers, n), init, "meta.pi");
  critic = nn::Mlp(mlp_dims(n, opts.hidden, opts.hidden_layers, 1), init, "meta.v");
  log_std = nn::Parameter("meta.pi.log_std", Mat::Constant(1, n, opts.log_std_init));
  const int count = static_cast<int>(std::lround(opts.fraction * n));
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int a = n - 1; a > 0; --a) {
    const int b = std::min(a, static_cast<int>(uniform01(init) * (a + 1)));
    std::swap(idx[a], idx[b]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  optimized_ = idx;
}

Mat MetaAgent::normalized(const HyperparamSet& h) const {
  Mat s(1, HyperparamSet::kCount);
  for (int c = 0; c < HyperparamSet::kCount; ++c) {
    const auto [lo, hi] = HyperparamSet::ranges()[c];
    s(0, c) = (h[c] - lo) / (hi - lo);
  }
  return s;
}

nn::ParamRefs MetaAgent::parameters() {
  return join({policy.parameters(), ParamRefs{&log_std}, critic.parameters()});
}

const HyperparamSet& MetaAgent::step(std::span<const double> ee_window) {
  ++steps_;
  if (!opts_.enabled || optimized_.empty()) return current_;

  if (pending_) {
    double mean = 0.0;
    for (double e : ee_window) mean += e;
    if (!ee_window.empty()) mean /= static_cast<double>(ee_window.size());
    pending_->reward = mean - pending_penalty_;
    pending_->next_state = normalized(current_);
    last_reward_ = pending_->reward;
    batch_.push_back(std::move(*pending_));
    pending_.reset();
    if (static_cast<int>(batch_.size()) >= opts_.batch) {
      train();
      batch_.clear();
    }
  }

  constexpr int n = HyperparamSet::kCount;
  MetaSample s;
  s.state = normalized(current_);
  const Mat mu = policy.forward(s.state);
  std::normal_distribution<double> normal(0.0, 1.0);
  s.u.resize(1, n);
  for (int c = 0; c < n; ++c) s.u(0, c) = mu(0, c) + std::exp(log_std.value(0, c)) * normal(rng_);
  {
    Graph g;
    Var m = policy.forward(g, g.constant(s.state));
    s.logp_old = g.value(gaussian_tanh_logp(g, m, g.param(log_std), s.u))(0, 0);
  }
  HyperDelta delta{};
  for (int c : optimized_) {
    const auto [lo, hi] = HyperparamSet::ranges()[c];
    delta[c] = std::tanh(s.u(0, c)) * opts_.step_fraction * (hi - lo);
  }
  history_.push_back(current_);
  const HyperparamSet next = meta_apply(current_, delta);
  const std::vector<double> none;
  pending_penalty_ = -meta_reward(none, history_, next, delta, opts_.lambda, opts_.t_xi, opts_.eps_xi);
  current_ = next;
  if (static_cast<int>(history_.size()) > opts_.t_xi) history_.erase(history_.begin());
  pending_ = std::move(s);
  return current_;
}

void MetaAgent::train() {
  const int b = static_cast<int>(batch_.size());
  if (b == 0) return;
  auto v = [&](const Mat& s) { return critic.forward(s)(0, 0); };
  Mat adv(b, 1);
  Mat logp_old(b, 1);
  for (int r = 0; r < b; ++r) {
    adv(r, 0) = ppo_advantage(batch_[r].reward, v(batch_[r].state), v(batch_[r].next_state),
                              opts_.gamma);
    logp_old(r, 0) = batch_[r].logp_old;
  }
  for (int epoch = 0; epoch < opts_.epochs; ++epoch) {
    {
      ParamRefs params = join({policy.parameters(), ParamRefs{&log_std}});
      nn::zero_grad(params);
      Graph g;
      std::vector<Var> lp;
      for (int r = 0; r < b; ++r) {
        Var mu = policy.forward(g, g.constant(batch_[r].state));
        lp.push_back(gaussian_tanh_logp(g, mu, g.param(log_std), batch_[r].u));
      }
      g.backward(clipped_policy_loss(g, g.concat_rows(lp), logp_old, adv, opts_.clip));
      if (opts_.grad_clip > 0.0) nn::clip_grad_norm(params, opts_.grad_clip);
      nn::sgd_step(params, opts_.lr);
    }
    {
      Mat target(b, 1);
      for (int r = 0; r < b; ++r) target(r, 0) = batch_[r].reward + opts_.gamma * v(batch_[r].next_state);
      ParamRefs params = critic.parameters();
      nn::zero_grad(params);
      Graph g;
      std::vector<Var> vs;
      for (int r = 0; r < b; ++r) vs.push_back(critic.forward(g, g.constant(batch_[r].state)));
      g.backward(squared_error_loss(g, g.concat_rows(vs), target));
      if (opts_.grad_clip > 0.0) nn::clip_grad_norm(params, opts_.grad_clip);
      nn::sgd_step(params, opts_.lr);
    }
  }
}

}  // namespace amris
