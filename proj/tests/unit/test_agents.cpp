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


#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "amris/agents.hpp"

using namespace amris;
using nn::Graph;
using nn::Var;

namespace {

AgentOptions small_options() {
  AgentOptions o;
  o.d_k = 8;
  o.num_heads = 2;
  o.attention_out = 4;
  o.hidden = 16;
  o.hidden_layers = 2;
  o.batch_size = 4;
  o.replay_capacity = 8;
  o.ppo_epochs = 4;
  return o;
}

ActionSpec small_spec() {
  ActionSpec s;
  s.continuous_dim = 3;
  s.head_sizes = {2, 2, 7};
  s.fixed = {-1, -1, -1};
  s.num_tokens = 3;
  s.token_dim = 4;
  return s;
}

Mat tokens_for(int seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Mat t(3, 4);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = n(rng);
  return t;
}

Mat snapshot(const nn::ParamRefs& ps) {
  Eigen::Index total = 0;
  for (auto* p : ps) total += p->value.size();
  Mat out(1, total);
  Eigen::Index off = 0;
  for (auto* p : ps) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) out(0, off + i) = p->value.data()[i];
    off += p->value.size();
  }
  return out;
}

double fd_error(nn::ParamRefs params, const std::function<Var(Graph&)>& loss) {
  nn::zero_grad(params);
  {
    Graph g;
    g.backward(loss(g));
  }
  auto eval = [&] {
    Graph g;
    return g.value(loss(g))(0, 0);
  };
  double worst = 0.0;
  for (auto* p : params)
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      double& x = p->value.data()[i];
      const double saved = x;
      x = saved + 1e-5;
      const double up = eval();
      x = saved - 1e-5;
      const double down = eval();
      x = saved;
      const double fd = (up - down) / 2e-5;
      const double an = p->grad.data()[i];
      worst = std::max(worst, std::abs(fd - an) / std::max(1e-3, std::abs(fd) + std::abs(an)));
    }
  return worst;
}

}  // namespace

TEST_CASE("hyperparameter ranges and midpoint") {
  const auto h = HyperparamSet::midpoint();
  CHECK(h.in_range());
  CHECK(h[HyperparamSet::kEtaD] == doctest::Approx(0.5 * (1e-4 + 1e-2)));
  CHECK(HyperparamSet::ranges()[HyperparamSet::kGammaD].second == 0.99);
  CHECK(std::string(HyperparamSet::names()[HyperparamSet::kEpsilon]) == "epsilon");
}

TEST_CASE("meta_apply examples") {
  HyperparamSet h = HyperparamSet::midpoint();
  const HyperDelta zero{};
  CHECK(meta_apply(h, zero).values == h.values);

  h[HyperparamSet::kGammaD] = 0.99;
  HyperDelta up{};
  up[HyperparamSet::kGammaD] = 0.05;
  CHECK(meta_apply(h, up)[HyperparamSet::kGammaD] == 0.99);

  h[HyperparamSet::kEtaD] = 1e-3;
  HyperDelta down{};
  down[HyperparamSet::kEtaD] = -2e-3;
  CHECK(meta_apply(h, down)[HyperparamSet::kEtaD] == 1e-4);
}

TEST_CASE("meta_reward examples") {
  const HyperparamSet h = HyperparamSet::midpoint();
  const std::vector<double> ee{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<HyperparamSet> hist(5, h);
  const HyperDelta zero{};
  CHECK(meta_reward(ee, hist, h, zero, 3e-4, 5, 1e-6) == doctest::Approx(0.6));

  HyperparamSet cur = h;
  for (auto& p : hist) p[HyperparamSet::kTauQ] = 0.4;
  cur[HyperparamSet::kTauQ] = 0.5;
  HyperDelta d{};
  d[HyperparamSet::kTauQ] = 0.1;
  CHECK(meta_reward(ee, hist, cur, d, 3e-4, 5, 1e-12) == doctest::Approx(0.6 - 3e-4).epsilon(1e-9));
  d[HyperparamSet::kTauQ] = -0.1;
  CHECK(meta_reward(ee, hist, cur, d, 3e-4, 5, 1e-12) == doctest::Approx(0.6 - 3e-4).epsilon(1e-9));

  // Cold start pads with the current value.
  std::vector<HyperparamSet> none;
  CHECK(meta_reward(ee, none, cur, d, 3e-4, 5, 1e-12) == doctest::Approx(0.6));
}

TEST_CASE("ppo scalar examples") {
  CHECK(ppo_advantage(2.5, 0.0, 0.0, 0.9) == 2.5);
  CHECK(ppo_advantage(1.0, 10.0, 10.0, 0.9) == doctest::Approx(0.0));
  CHECK(ppo_advantage(1.0, 3.0, 7.0, 0.0) == -2.0);

  CHECK(ppo_surrogate(-0.3, -0.3, 0.7, 0.2) == doctest::Approx(0.7));
  CHECK(ppo_surrogate(std::log(1.5), 0.0, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(ppo_surrogate(std::log(0.5), 0.0, -1.0, 0.2) == doctest::Approx(-0.8));

  CHECK(ppo_value_loss(2.0, 1.0, 10.0 / 9.0, 0.9) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ppo_value_loss(0.0, 2.0, 0.0, 0.5) == 4.0);
  const double v = 0.7, h = 1e-6;
  const double fd = (ppo_value_loss(v + h, 2.0, 1.0, 0.5) - ppo_value_loss(v - h, 2.0, 1.0, 0.5)) / (2 * h);
  CHECK(fd == doctest::Approx(2 * (v - 2.5)).epsilon(1e-6));
}

TEST_CASE("factored heads: hand Q-table, ties and affine invariance") {
  Mat q(1, 4);
  q << 1.0, 3.0, -2.0, -5.0;
  const int sizes[] = {2, 2};
  CHECK(factored_max_sum(q, sizes) == 1.0);
  CHECK(factored_argmax(q, sizes) == std::vector<int>{1, 0});
  Mat tie(1, 4);
  tie << 2.0, 2.0, 0.5, 0.5;
  CHECK(factored_argmax(tie, sizes) == std::vector<int>{0, 0});

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  const int big[] = {2, 2, 2, 7};
  for (int t = 0; t < 500; ++t) {
    Mat r(1, 13);
    for (auto& x : r.reshaped()) x = u(rng);
    const double a = std::exp(u(rng)), b = u(rng) * 10;
    Mat s = (r.array() * a + b).matrix();
    CHECK(factored_argmax(r, big) == factored_argmax(s, big));
  }
}

TEST_CASE("dqn selection") {
  HybridAgent agent(0, small_spec(), small_options(), 7);
  const Mat s = tokens_for(1);
  const auto greedy = factored_argmax(agent.q_values(s), agent.spec().head_sizes);
  for (int t = 0; t < 20; ++t) CHECK(agent.select_discrete(s, 0.0) == greedy);
  int differ = 0;
  for (int t = 0; t < 50; ++t) differ += agent.select_discrete(s, 1.0) != greedy;
  CHECK(differ > 0);

  HybridAgent a(0, small_spec(), small_options(), 9), b(0, small_spec(), small_options(), 9);
  for (int t = 0; t < 20; ++t) CHECK(a.select_discrete(s, 0.5) == b.select_discrete(s, 0.5));

  ActionSpec pinned = small_spec();
  pinned.fixed = {0, -1, 6};
  HybridAgent p(0, pinned, small_options(), 3);
  for (int t = 0; t < 30; ++t) {
    const auto act = p.select_discrete(s, 0.5);
    CHECK(act[0] == 0);
    CHECK(act[2] == 6);
  }
}

TEST_CASE("dqn target") {
  HybridAgent agent(0, small_spec(), small_options(), 2);
  const Mat s = tokens_for(3);
  CHECK(agent.dqn_target(1.25, s, 0.0) == 1.25);
  const double m = factored_max_sum(agent.target_q_values(s), agent.spec().head_sizes);
  CHECK(agent.dqn_target(1.25, s, 0.9) == doctest::Approx(1.25 + 0.9 * m));
}

TEST_CASE("dqn update: perfect fit leaves parameters alone") {
  HybridAgent agent(0, small_spec(), small_options(), 4);
  std::vector<ReplayEntry> entries;
  for (int e = 0; e < 3; ++e) {
    ReplayEntry r;
    r.state = tokens_for(10 + e);
    r.next_state = tokens_for(20 + e);
    r.action = {e % 2, 1, e};
    const Mat q = agent.q_values(r.state);
    const double q_sa = q(0, r.action[0]) + q(0, 2 + r.action[1]) + q(0, 4 + r.action[2]);
    const double boot = factored_max_sum(agent.target_q_values(r.next_state), agent.spec().head_sizes);
    r.reward = q_sa - 0.9 * boot;
    entries.push_back(r);
  }
  std::vector<const ReplayEntry*> batch;
  for (auto& e : entries) batch.push_back(&e);
  const Mat before = snapshot(agent.online_parameters());
  const double loss = agent.dqn_update_batch(batch, 0.9, 0.01);
  CHECK(loss < 1e-24);
  CHECK((snapshot(agent.online_parameters()) - before).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dqn loss gradient and sign") {
  HybridAgent agent(0, small_spec(), small_options(), 5);
  const Mat s = tokens_for(4);
  Mat mask = Mat::Zero(1, 11);
  mask(0, 1) = mask(0, 2) = mask(0, 8) = 1.0;
  Mat y(1, 1);
  y << 0.37;
  auto loss = [&](Graph& g) {
    Var x = agent.encoder.encode(g, agent.preprocess(s), false, nullptr);
    return dqn_loss(g, agent.q_net.forward(g, x), mask, y);
  };
  CHECK(fd_error(agent.online_parameters(), loss) < 1e-4);
  Graph g;
  const double l = g.value(loss(g))(0, 0);
  const Mat q = agent.q_values(s);
  const double diff = q(0, 1) + q(0, 2) + q(0, 8) - 0.37;
  CHECK(l == doctest::Approx(diff * diff));
  CHECK(l >= 0.0);
}

TEST_CASE("dqn_train_step waits for a full batch") {
  auto opts = small_options();
  HybridAgent agent(0, small_spec(), opts, 6);
  const auto h = HyperparamSet::midpoint();
  for (int e = 0; e < opts.batch_size; ++e) {
    CHECK_FALSE(agent.dqn_train_step(h).has_value());
    agent.remember({tokens_for(e), {0, 1, 2}, 0.1, tokens_for(e + 1)});
  }
  const auto loss = agent.dqn_train_step(h);
  REQUIRE(loss.has_value());
  CHECK(*loss >= 0.0);
}

TEST_CASE("replay buffer keeps the newest entries") {
  ReplayBuffer buf(128);
  for (int e = 0; e < 300; ++e) {
    buf.push({Mat::Constant(1, 1, e), {}, static_cast<double>(e), Mat()});
    CHECK(buf.size() <= 128);
  }
  CHECK(buf.size() == 128);
  CHECK(buf.at(0).reward == 172.0);
  Rng rng = make_stream(1, "replay/0");
  const auto s = buf.sample(64, rng);
  CHECK(s.size() == 64);
  std::set<const ReplayEntry*> uniq(s.begin(), s.end());
  CHECK(uniq.size() == 64);
}

TEST_CASE("soft update examples and contraction") {
  HybridAgent agent(0, small_spec(), small_options(), 8);
  auto online = agent.online_parameters();
  auto target = agent.target_parameters();
  CHECK((snapshot(online) == snapshot(target)));
  for (auto* p : online) p->value.array() += 0.5;
  const Mat phi = snapshot(online);
  const Mat old = snapshot(target);
  agent.soft_update_targets(0.0);
  CHECK((snapshot(target) == old));
  agent.soft_update_targets(0.3);
  const Mat now = snapshot(target);
  CHECK((now - phi).norm() == doctest::Approx(0.7 * (old - phi).norm()).epsilon(1e-12));
  agent.soft_update_targets(1.0);
  CHECK((snapshot(target) - phi).cwiseAbs().maxCoeff() < 1e-15);

  nn::Parameter a("a", Mat::Constant(1, 1, 2.0)), b("b", Mat::Constant(1, 1, 0.0));
  nn::ParamRefs pa{&a}, pb{&b};
  nn::soft_update(pa, pb, 0.5);
  CHECK(b.value(0, 0) == 1.0);
}

TEST_CASE("ppo: first epoch ratio is exactly one") {
  HybridAgent agent(0, small_spec(), small_options(), 10);
  const auto h = HyperparamSet::midpoint();
  std::vector<PpoSample> batch;
  double adv_mean = 0.0;
  for (int t = 0; t < 5; ++t) {
    PpoSample s;
    s.state = tokens_for(30 + t);
    s.next_state = tokens_for(31 + t);
    const auto c = agent.sample_continuous(s.state);
    s.u = c.u;
    s.logp_old = c.logp;
    s.reward = 0.1 * t - 0.2;
    adv_mean += ppo_advantage(s.reward, agent.value(s.state), agent.value(s.next_state), h[HyperparamSet::kGammaC]);
    batch.push_back(s);
  }
  adv_mean /= 5;
  const auto l = agent.ppo_update_on(batch, h);
  CHECK(l.policy == doctest::Approx(-adv_mean).epsilon(1e-12));
}

TEST_CASE("ppo: zero advantage leaves the policy alone") {
  HybridAgent agent(0, small_spec(), small_options(), 11);
  const auto h = HyperparamSet::midpoint();
  const double gamma = h[HyperparamSet::kGammaC];
  std::vector<PpoSample> batch;
  for (int t = 0; t < 5; ++t) {
    PpoSample s;
    s.state = tokens_for(40 + t);
    s.next_state = tokens_for(41 + t);
    const auto c = agent.sample_continuous(s.state);
    s.u = c.u;
    s.logp_old = c.logp;
    s.reward = agent.value(s.state) - gamma * agent.value(s.next_state);
    batch.push_back(s);
  }
  const Mat before = snapshot(agent.policy_parameters());
  agent.ppo_update_on(batch, h);
  CHECK((snapshot(agent.policy_parameters()) - before).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ppo: policy loss gradient away from clip kinks") {
  HybridAgent agent(0, small_spec(), small_options(), 12);
  const Mat s = tokens_for(50);
  const auto c = agent.sample_continuous(s);
  Mat old(1, 1), adv(1, 1);
  old << c.logp - 0.05;  // ratio about 1.05, inside the clip band
  adv << 0.8;
  auto loss = [&](Graph& g) {
    Var mu = agent.policy.forward(g, agent.encoder.encode(g, agent.preprocess(s), false, nullptr));
    return clipped_policy_loss(g, gaussian_tanh_logp(g, mu, g.param(agent.log_std), c.u), old, adv, 0.2);
  };
  CHECK(fd_error(agent.policy_parameters(), loss) < 1e-4);
}

TEST_CASE("ppo: log-prob includes the tanh correction") {
  HybridAgent agent(0, small_spec(), small_options(), 13);
  const Mat s = tokens_for(60);
  const Mat mu = agent.policy_mean(s);
  Mat u(1, 3);
  u << 0.3, -1.1, 2.0;
  double expect = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double sd = std::exp(agent.log_std.value(0, a));
    const double z = (u(0, a) - mu(0, a)) / sd;
    expect += -0.5 * z * z - std::log(sd) - 0.5 * std::log(2 * kPi);
    expect -= std::log(1 - std::tanh(u(0, a)) * std::tanh(u(0, a)) + 1e-6);
  }
  CHECK(agent.log_prob(s, u) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("ppo: value loss falls on a frozen batch") {
  auto opts = small_options();
  HybridAgent agent(0, small_spec(), opts, 14);
  auto h = HyperparamSet::midpoint();
  h[HyperparamSet::kGammaC] = 0.1;
  h[HyperparamSet::kEtaC1] = 1e-4;
  h[HyperparamSet::kEtaC2] = 1e-2;
  std::vector<PpoSample> batch;
  for (int t = 0; t < 5; ++t) {
    PpoSample s;
    s.state = tokens_for(70 + t);
    s.next_state = tokens_for(71 + t);
    const auto c = agent.sample_continuous(s.state);
    s.u = c.u;
    s.logp_old = c.logp;
    s.reward = 1.0 + 0.5 * t;
    batch.push_back(s);
  }
  const double first = agent.ppo_update_on(batch, h).value;
  double last = first;
  for (int r = 0; r < 30; ++r) last = agent.ppo_update_on(batch, h).value;
  CHECK(last < first);
  CHECK(agent.ppo_update_on({}, h).value == 0.0);
}

TEST_CASE("meta agent keeps every hyperparameter in range") {
  MetaOptions o;
  o.hidden = 16;
  o.step_fraction = 0.5;  // large steps to hit the clamps
  MetaAgent meta(o, 3);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool moved = false;
  const auto start = meta.current();
  for (int t = 0; t < 400; ++t) {
    std::vector<double> window(5);
    for (auto& e : window) e = u(rng);
    const auto& h = meta.step(window);
    REQUIRE(h.in_range());
    moved = moved || h.values != start.values;
  }
  CHECK(moved);
  CHECK(meta.steps() == 400);
  CHECK(std::isfinite(meta.last_reward()));
}

TEST_CASE("frozen meta agent never changes the hyperparameters") {
  MetaOptions o;
  o.hidden = 16;
  o.enabled = false;
  MetaAgent meta(o, 3);
  const std::vector<double> window{0.1, 0.2, 0.3, 0.4, 0.5};
  for (int t = 0; t < 50; ++t) CHECK(meta.step(window).values == HyperparamSet::midpoint().values);
  CHECK(meta.steps() == 50);
}

TEST_CASE("meta agent only moves the optimized subset") {
  MetaOptions o;
  o.hidden = 16;
  o.fraction = 0.5;
  MetaAgent meta(o, 5);
  REQUIRE(meta.optimized().size() == 4);
  const std::vector<double> window{0.1, 0.2, 0.3, 0.4, 0.5};
  for (int t = 0; t < 40; ++t) meta.step(window);
  const auto mid = HyperparamSet::midpoint();
  std::vector<int> changed;
  for (int c = 0; c < HyperparamSet::kCount; ++c)
    if (meta.current()[c] != mid[c]) changed.push_back(c);
  for (int c : changed)
    CHECK(std::find(meta.optimized().begin(), meta.optimized().end(), c) != meta.optimized().end());
}
