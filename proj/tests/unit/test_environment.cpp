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
#include <limits>
#include <random>

#include "amris/environment.hpp"
#include "oracles.hpp"

using namespace amris;
namespace orc = amris::oracle;

namespace {

ScenarioConfig tiny() {
  ScenarioConfig c;
  c.num_ris = 1;
  c.ris_mx = 2;
  c.ris_my = 1;
  c.num_tx = 2;
  c.num_rx = 2;
  c.num_dl_users = 1;
  c.num_ul_users = 1;
  c.seed = 3;
  return c;
}

std::vector<HybridAction> zero_actions(const World& w) {
  std::vector<HybridAction> out;
  for (int a = 0; a < w.num_agents(); ++a) {
    const ActionSpec spec = action_spec(w, a);
    HybridAction h;
    h.agent_id = a;
    h.continuous.assign(spec.continuous_dim, 0.0);
    h.discrete.assign(spec.head_sizes.size(), 0);
    out.push_back(h);
  }
  return out;
}

std::vector<HybridAction> random_actions(const World& w, std::mt19937_64& rng, double spread = 1.5) {
  std::uniform_real_distribution<double> u(-spread, spread);
  auto out = zero_actions(w);
  for (int a = 0; a < w.num_agents(); ++a) {
    const ActionSpec spec = action_spec(w, a);
    for (auto& c : out[a].continuous) c = u(rng);
    for (std::size_t h = 0; h < spec.head_sizes.size(); ++h)
      out[a].discrete[h] = static_cast<int>(rng() % (spec.head_sizes[h] + 2)) - 1;
  }
  return out;
}

}  // namespace

TEST_CASE("action and state shapes") {
  World w = make_world(tiny());
  CHECK(w.num_agents() == 2);
  const auto ris = action_spec(w, 0);
  CHECK(ris.continuous_dim == 4);
  CHECK(ris.head_sizes.size() == 3);
  CHECK(ris.head_sizes.back() == kNumAavMoves);
  const auto bs = action_spec(w, 1);
  CHECK(bs.continuous_dim == 2 * 2 * 1 + 1);
  CHECK(bs.head_sizes.size() == 4);
  CHECK(bs.head_sizes[0] == kNumFaMoves);

  const auto st = assemble_state(w, 0);
  CHECK(st.tokens.rows() == 2);
  CHECK(st.tokens.cols() == 4);
  CHECK_THROWS_AS(action_spec(w, 2), std::out_of_range);
}

TEST_CASE("surface tokens vanish when the surface is off") {
  World w = make_world(ScenarioConfig{});
  for (auto& c : w.configs) std::fill(c.alpha.begin(), c.alpha.end(), 0);
  for (int i = 0; i < w.sc.num_ris; ++i) CHECK(assemble_state(w, i).tokens.norm() == 0.0);
}

TEST_CASE("tokens match the direct products") {
  World w = make_world(ScenarioConfig{});
  std::mt19937_64 rng(2);
  w.configs = orc::random_configs(w.sc.num_ris, w.sc.num_elements, rng);
  const ChannelSet& ch = w.channels;
  for (int i = 0; i < w.sc.num_ris; ++i) {
    const auto st = assemble_state(w, i);
    for (int row = 0; row < w.sc.num_dl + w.sc.num_ul; ++row) {
      const bool dl = row < w.sc.num_dl;
      const CVec& g = dl ? ch.g_dl[i][row] : ch.g_ul[i][row - w.sc.num_dl];
      for (int n = 0; n < w.sc.num_tx; ++n) {
        orc::C acc{};
        for (int m = 0; m < w.sc.num_elements; ++m)
          acc += std::conj(g[m]) * orc::theta_of(w.configs[i], m) * ch.d_t[i](m, n);
        CHECK(st.tokens(row, 2 * n) == doctest::Approx(acc.real()).epsilon(1e-10));
        CHECK(st.tokens(row, 2 * n + 1) == doctest::Approx(acc.imag()).epsilon(1e-10));
      }
    }
  }
  const auto bs = assemble_state(w, w.bs_agent());
  const auto h = orc::cascade_ul(ch, w.configs, 1);
  CHECK(bs.tokens(w.sc.num_dl + 1, 0) == doctest::Approx(h[0].real()).epsilon(1e-10));
  CHECK(bs.tokens(w.sc.num_dl + 1, 1) == doctest::Approx(h[0].imag()).epsilon(1e-10));
}

TEST_CASE("project_actions examples") {
  World w = make_world(tiny());
  auto acts = zero_actions(w);
  auto p = project_actions(acts, w);
  CHECK(p.configs[0].beta[0] == doctest::Approx(1.5));
  CHECK(p.configs[0].theta[1] == doctest::Approx(kPi));
  CHECK(p.vars.p[0] == doctest::Approx(0.5));

  // Every entry at full scale: four times the budget.
  std::fill(acts[1].continuous.begin(), acts[1].continuous.begin() + 4, 1.0);
  p = project_actions(acts, w);
  CHECK(p.vars.bs_power() <= 40.0);
  CHECK(p.vars.bs_power() == doctest::Approx(40.0).epsilon(1e-14));
  CHECK(p.vars.w[0][0].real() == doctest::Approx(std::sqrt(40.0) / 2));

  std::fill(acts[1].continuous.begin(), acts[1].continuous.begin() + 4, 0.3);
  p = project_actions(acts, w);
  CHECK(p.vars.w[0][1] == cdouble(0.3 * std::sqrt(40.0), 0.3 * std::sqrt(40.0)));
  CHECK(p.vars.bs_power() == doctest::Approx(0.36 * 40.0));

  acts.pop_back();
  CHECK_THROWS_AS(project_actions(acts, w), std::invalid_argument);
}

TEST_CASE("projected actions always satisfy the hard constraints") {
  ScenarioConfig cfg;
  cfg.eh_ratio = 0.25;
  cfg.fa_mode = FaMode::kPartial;
  World w = make_world(cfg);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 2000; ++t) {
    auto acts = random_actions(w, rng, t % 2 ? 1.0 : 50.0);
    if (t % 7 == 0) acts[0].continuous[0] = std::numeric_limits<double>::quiet_NaN();
    const auto p = project_actions(acts, w);
    REQUIRE(p.vars.bs_power() <= w.sc.p_bs);
    for (double pk : p.vars.p) {
      REQUIRE(pk >= 0.0);
      REQUIRE(pk <= w.sc.p_ul);
    }
    for (int i = 0; i < w.sc.num_ris; ++i)
      for (int m = 0; m < w.sc.num_elements; ++m) {
        REQUIRE(p.configs[i].beta[m] > 0.0);
        REQUIRE(p.configs[i].beta[m] <= w.sc.beta_max);
        REQUIRE(p.configs[i].theta[m] >= 0.0);
        REQUIRE(p.configs[i].theta[m] < 2 * kPi);
        REQUIRE((p.configs[i].alpha[m] == 0 || p.configs[i].alpha[m] == 1));
        if (w.eh_forced[i][m]) REQUIRE(p.configs[i].alpha[m] == 0);
      }
    for (std::size_t e = 0; e < p.fa_moves.size(); ++e) {
      REQUIRE(p.fa_moves[e] >= 0);
      REQUIRE(p.fa_moves[e] < kNumFaMoves);
      if (!w.fa_fluid[e]) REQUIRE(p.fa_moves[e] == static_cast<int>(FaMove::kStay));
    }
    for (const Vec3& v : p.commanded_velocity) REQUIRE(v.norm() <= w.sc.limits.v_max + 1e-12);
  }
}

TEST_CASE("compute_reward examples") {
  ScenarioConfig cfg = tiny();
  cfg.rate_th_dl = 0.0;
  cfg.rate_th_ul = 0.0;
  cfg.p_max = 1e6;
  World w = make_world(cfg);
  auto r = compute_reward(w);
  CHECK(r.reward == r.ee);

  const double rate0 = r.eval.rates_dl[0];
  w.sc.rate_th_dl = rate0 + 0.5;
  r = compute_reward(w);
  CHECK(r.penalties.c[0] == doctest::Approx(0.5));
  CHECK(r.reward == doctest::Approx(r.ee - 2.5e-4).epsilon(1e-12));

  w.sc.rate_th_dl = 0.0;
  double total = 0.0;
  for (const auto& s : r.eval.ris) total += s.total;
  w.sc.p_max = total;
  r = compute_reward(w);
  CHECK(r.penalties.c[2] == 0.0);
  w.sc.p_max = total - 1.0;
  r = compute_reward(w);
  CHECK(r.penalties.c[2] == doctest::Approx(1.0));
}

TEST_CASE("step is deterministic and robust to zero actions") {
  World a = make_world(ScenarioConfig{});
  World b = make_world(ScenarioConfig{});
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto acts = t == 0 ? zero_actions(a) : random_actions(a, rng);
    const auto ra = step(a, acts);
    const auto rb = step(b, acts);
    CHECK(std::isfinite(ra.reward));
    CHECK(ra.reward == rb.reward);
    CHECK(ra.record.ee == rb.record.ee);
    CHECK(ra.record.rates_ul == rb.record.rates_ul);
    CHECK(ra.record.slot == t + 1);
    REQUIRE(ra.next_states.size() == rb.next_states.size());
    for (std::size_t s = 0; s < ra.next_states.size(); ++s)
      CHECK((ra.next_states[s].tokens == rb.next_states[s].tokens));
  }
}

TEST_CASE("reward never exceeds efficiency and geometry stays feasible") {
  ScenarioConfig cfg;
  cfg.d_min = 400.0;  // force the separation term on
  World w = make_world(cfg);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 300; ++t) {
    const auto res = step(w, random_actions(w, rng));
    CHECK(res.reward <= res.record.ee);
    for (double c : res.record.penalties.c) CHECK(c >= 0.0);
    CHECK(fa_layout_feasible(w.fa, w.sc.fa_spacing));
    for (const auto& a : w.aav) {
      CHECK(a.velocity.norm() <= w.sc.limits.v_max + 1e-9);
      CHECK(a.position.z >= 50.0);
    }
  }
}

TEST_CASE("end-to-end slot matches the chained oracles") {
  ScenarioConfig cfg = tiny();
  cfg.los_probability = false;
  World w = make_world(cfg);
  const Vec3 start = w.aav[0].position;
  auto acts = zero_actions(w);
  acts[0].continuous = {0.2, -0.6, 0.5, -0.1};
  acts[0].discrete = {1, 0, static_cast<int>(AavMove::kPlusX)};
  acts[1].continuous = {0.3, -0.2, 0.1, 0.4, 0.6};
  acts[1].discrete = {4, 4, 4, 1};
  const auto res = step(w, acts);

  // Kinematics: accelerating from rest is capped at a_max * tau = 1 m/s.
  CHECK(w.aav[0].position.x == doctest::Approx(start.x + 1.0));
  CHECK(w.aav[0].velocity.norm() == doctest::Approx(1.0));

  // Projection by hand.
  CHECK(w.configs[0].alpha == std::vector<int>{1, 0});
  CHECK(w.configs[0].beta[0] == doctest::Approx(3.0 * 1.2 / 2));
  CHECK(w.configs[0].theta[0] == doctest::Approx(kPi * 1.5));
  const double amp = std::sqrt(40.0);
  CHECK(w.vars.w[0][0] == cdouble(0.3 * amp, -0.2 * amp));
  CHECK(w.vars.p[0] == doctest::Approx(0.8));

  const NoisePowers& n = w.sc.noise;
  const double r_dl = std::log2(1 + orc::dl_sinr(w.channels, w.configs, w.vars, n, 0));
  const double r_ul = std::log2(1 + orc::ul_sinr(w.channels, w.configs, w.vars, n, 0));
  CHECK(orc::rel_err(res.record.rates_dl[0], r_dl) < 1e-9);
  CHECK(orc::rel_err(res.record.rates_ul[0], r_ul) < 1e-9);

  const auto inc = orc::incident(w.channels, w.configs, w.vars, n.ris, 0);
  const double harvest = orc::harvested(inc[1]);
  const double circuit = 0.105 + 0.05;
  const double amplifier = 1.1 * orc::output_power(w.channels, w.configs, w.vars, n.ris, 0);
  const double mech = orc::aav_power(1.0);
  const double ris_total = mech + std::max(0.0, circuit + amplifier - harvest);
  CHECK(orc::rel_err(res.record.ris[0].total, ris_total) < 1e-9);
  CHECK(orc::rel_err(res.record.ris[0].mechanical, mech) < 1e-9);

  const double ee = (r_dl + r_ul) / (ris_total + w.vars.bs_power() + w.vars.p[0]);
  CHECK(orc::rel_err(res.record.ee, ee) < 1e-9);
  const double pen = 5e-4 * std::max(0.0, 1.0 - r_dl) + 5e-4 * std::max(0.0, 1.0 - r_ul) +
                     5e-4 * std::max(0.0, ris_total - 100.0);
  CHECK(orc::rel_err(res.reward, ee - pen) < 1e-9);
  CHECK(res.record.slot == 1);
}

TEST_CASE("episode reset re-drops users inside the area") {
  World w = make_world(ScenarioConfig{});
  const auto before = w.dl_users;
  reset_episode(w, 1);
  CHECK(w.episode == 1);
  CHECK_FALSE(w.dl_users == before);
  for (const auto& u : w.dl_users) {
    CHECK(u.x >= 0.0);
    CHECK(u.x <= 500.0);
    CHECK(u.z == 1.5);
  }
}

TEST_CASE("duplex switches remove one side") {
  ScenarioConfig cfg;
  cfg.duplex = DuplexMode::kDownlinkOnly;
  World w = make_world(cfg);
  CHECK(w.sc.num_ul == 0);
  CHECK(action_spec(w, w.bs_agent()).continuous_dim == 2 * cfg.num_tx * cfg.num_dl_users);
  const auto r = step(w, zero_actions(w));
  CHECK(r.record.rates_ul.empty());
}
