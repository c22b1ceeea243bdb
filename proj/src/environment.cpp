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


#include "amris/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace amris {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kTwoPi = 2.0 * kPi;

double unit(double c) {
  if (!std::isfinite(c)) return 0.0;
  return std::min(1.0, std::max(-1.0, c));
}

int clamp_code(int code, int n) { return std::min(n - 1, std::max(0, code)); }

void put_interleaved(Eigen::MatrixXd& tokens, int row, const CRow& v) {
  for (Eigen::Index n = 0; n < v.size(); ++n) {
    tokens(row, 2 * n) = v[n].real();
    tokens(row, 2 * n + 1) = v[n].imag();
  }
}

std::vector<int> pick_subset(int n, int count, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int a = n - 1; a > 0; --a) {
    const int b = static_cast<int>(uniform01(rng) * (a + 1));
    std::swap(idx[a], idx[std::min(b, a)]);
  }
  idx.resize(count);
  return idx;
}

}  // namespace

Scenario Scenario::from_config(const ScenarioConfig& cfg) {
  Scenario s;
  s.channel.h0 = db_to_linear(cfg.h0_db);
  s.channel.kappa0 = cfg.kappa0;
  s.channel.rician = db_to_linear(cfg.rician_db);
  s.channel.rician_si = db_to_linear(cfg.rician_si_db);
  s.channel.wavelength = kSpeedOfLight / cfg.carrier_hz;
  s.channel.b1 = cfg.b1;
  s.channel.b2 = cfg.b2;
  s.channel.los_exponent_sign = cfg.los_sign_conventional ? -1.0 : 1.0;
  s.channel.use_los_probability = cfg.los_probability;
  s.channel.ris_mx = cfg.ris_mx;
  s.channel.ris_my = cfg.ris_my;
  s.channel.ris_spacing = s.channel.wavelength / 2.0;

  s.aav.p_bp = cfg.p_bp;
  s.aav.p_ip = cfg.p_ip;
  s.aav.omega_b = cfg.omega_b;
  s.aav.omega_r = cfg.omega_r;
  s.aav.v_r = cfg.v_r;
  s.aav.zeta_d = cfg.zeta_d;
  s.aav.zeta_a = cfg.zeta_a;
  s.aav.zeta_s = cfg.zeta_s;
  s.aav.zeta_r = cfg.zeta_r;
  s.aav.zeta_c = cfg.zeta_c;
  s.aav.weight_aav = cfg.weight_aav;
  s.aav.weight_ris_per_element = cfg.weight_ris / 32.0;
  s.aav.parasite_exponent = cfg.parasite_exponent;
  s.aav.induced_from_weight = cfg.induced_from_weight;
  s.aav = with_weight(s.aav, cfg.num_elements());

  s.eh = EhParams{cfg.z1, cfg.c1, cfg.c2};
  s.ris_power = RisPowerParams{cfg.p_ph, cfg.p_am, cfg.p_hc, cfg.varsigma_pa};
  const double n0 = dbm_to_watt(cfg.noise_dbm);
  s.noise = NoisePowers{n0, n0, n0};
  s.limits = AavLimits{cfg.v_max, cfg.a_max, Vec3{0.0, 0.0, cfg.z_min},
                       Vec3{cfg.area_x, cfg.area_y, cfg.z_max}};
  s.fa_spacing = FaSpacing{cfg.d_th1, cfg.d_th2};

  s.num_ris = cfg.num_ris;
  s.num_elements = cfg.num_elements();
  s.num_tx = cfg.num_tx;
  s.num_rx = cfg.num_rx;
  s.num_dl = cfg.active_dl_users();
  s.num_ul = cfg.active_ul_users();
  s.beta_max = cfg.beta_max;
  s.p_bs = cfg.p_bs;
  s.p_ul = cfg.p_ul;
  s.p_max = cfg.p_max;
  s.rate_th_dl = cfg.rate_th_dl;
  s.rate_th_ul = cfg.rate_th_ul;
  s.tau = cfg.tau;
  s.d_min = cfg.d_min;
  s.rho = {cfg.rho1, cfg.rho2, cfg.rho3, cfg.rho4, cfg.rho5, cfg.rho6};
  s.bf_projection = cfg.bf_projection;
  return s;
}

double PenaltyBreakdown::weighted() const {
  double s = 0.0;
  for (int c = 0; c < 6; ++c) s += rho[c] * this->c[c];
  return s;
}

NetworkTopology World::topology() const {
  NetworkTopology t;
  t.bs = bs;
  for (const auto& a : aav) t.ris.push_back(a.position);
  t.fa = fa;
  t.dl_users = dl_users;
  t.ul_users = ul_users;
  return t;
}

World make_world(const ScenarioConfig& cfg) {
  validate(cfg);
  World w;
  w.sc = Scenario::from_config(cfg);
  w.bs = Vec3{cfg.bs_x, cfg.bs_y, cfg.bs_height};
  w.area_x = cfg.area_x;
  w.area_y = cfg.area_y;
  w.user_height = cfg.user_height;
  w.channel_rng = make_stream(cfg.seed, "channels");
  w.user_rng = make_stream(cfg.seed, "users");
  Rng init = make_stream(cfg.seed, "world");

  const Scenario& s = w.sc;
  for (int i = 0; i < s.num_ris; ++i) {
    const double a = kTwoPi * i / s.num_ris;
    Vec3 p{cfg.bs_x + cfg.ris_init_radius * std::cos(a), cfg.bs_y + cfg.ris_init_radius * std::sin(a),
           cfg.ris_init_height};
    p.x = std::clamp(p.x, s.limits.box_min.x, s.limits.box_max.x);
    p.y = std::clamp(p.y, s.limits.box_min.y, s.limits.box_max.y);
    w.aav.push_back(AavState{p, Vec3{}, Vec3{}});
  }

  w.fa = make_fa_layout(s.num_tx, s.num_rx, cfg.fa_length_x, cfg.fa_length_y, cfg.fa_resolution,
                        cfg.bs_height);
  w.fa_requested = w.fa;
  const int n_fa = s.num_tx + s.num_rx;
  w.fa_fluid.assign(n_fa, 1);
  for (int e = 0; e < n_fa; ++e) {
    const int local = e < s.num_tx ? e : e - s.num_tx;
    if (cfg.fa_mode == FaMode::kRigid || (cfg.fa_mode == FaMode::kPartial && local % 2 == 1))
      w.fa_fluid[e] = 0;
  }

  const int m = s.num_elements;
  const int forced = static_cast<int>(std::lround(cfg.eh_ratio * m));
  w.eh_forced.assign(s.num_ris, std::vector<int>(m, 0));
  for (int i = 0; i < s.num_ris; ++i) {
    for (int e : pick_subset(m, forced, init)) w.eh_forced[i][e] = 1;
    AmRisConfig c = AmRisConfig::uniform(m, 1, 1.0, 0.0);
    for (int e = 0; e < m; ++e)
      if (w.eh_forced[i][e]) c.alpha[e] = 0;
    w.configs.push_back(std::move(c));
  }

  w.vars.w.assign(s.num_dl, CVec::Zero(s.num_tx));
  w.vars.p.assign(s.num_ul, 0.0);
  reset_episode(w, 0);
  return w;
}

void reset_episode(World& w, int episode) {
  auto drop = [&](int n) {
    std::vector<Vec3> users;
    for (int k = 0; k < n; ++k) {
      const double x = w.area_x * uniform01(w.user_rng);
      const double y = w.area_y * uniform01(w.user_rng);
      users.push_back(Vec3{x, y, w.user_height});
    }
    return users;
  };
  w.dl_users = drop(w.sc.num_dl);
  w.ul_users = drop(w.sc.num_ul);
  w.episode = episode;
  w.channels = draw_channels(w.topology(), w.sc.channel, w.channel_rng);
}

ActionSpec action_spec(const World& w, int agent_id) {
  const Scenario& s = w.sc;
  ActionSpec spec;
  spec.num_tokens = s.num_dl + s.num_ul;
  if (agent_id < 0 || agent_id > s.num_ris)
    throw std::out_of_range("agent id " + std::to_string(agent_id));
  if (agent_id < s.num_ris) {
    const int m = s.num_elements;
    spec.continuous_dim = 2 * m;
    spec.head_sizes.assign(m, 2);
    spec.head_sizes.push_back(kNumAavMoves);
    spec.fixed.assign(m + 1, -1);
    for (int e = 0; e < m; ++e)
      if (w.eh_forced[agent_id][e]) spec.fixed[e] = 0;
    spec.token_dim = 2 * s.num_tx;
  } else {
    spec.continuous_dim = 2 * s.num_tx * s.num_dl + s.num_ul;
    const int n_fa = s.num_tx + s.num_rx;
    spec.head_sizes.assign(n_fa, kNumFaMoves);
    spec.fixed.assign(n_fa, -1);
    for (int e = 0; e < n_fa; ++e)
      if (!w.fa_fluid[e]) spec.fixed[e] = static_cast<int>(FaMove::kStay);
    spec.token_dim = 2 * std::max(s.num_tx, s.num_rx);
  }
  return spec;
}

AgentState assemble_state(const World& w, int agent_id) {
  const Scenario& s = w.sc;
  const ActionSpec spec = action_spec(w, agent_id);
  AgentState st;
  st.agent_id = agent_id;
  st.tokens = Eigen::MatrixXd::Zero(spec.num_tokens, spec.token_dim);
  const ChannelSet& ch = w.channels;
  if (agent_id < s.num_ris) {
    const CVec theta = w.configs[agent_id].diagonal();
    const CMat td = theta.asDiagonal() * ch.d_t[agent_id];
    for (int k = 0; k < s.num_dl; ++k) put_interleaved(st.tokens, k, ch.g_dl[agent_id][k].adjoint() * td);
    for (int k = 0; k < s.num_ul; ++k)
      put_interleaved(st.tokens, s.num_dl + k, ch.g_ul[agent_id][k].adjoint() * td);
  } else {
    for (int k = 0; k < s.num_dl; ++k) put_interleaved(st.tokens, k, cascade_dl(ch, w.configs, k));
    for (int k = 0; k < s.num_ul; ++k)
      put_interleaved(st.tokens, s.num_dl + k, cascade_ul(ch, w.configs, k).transpose());
  }
  return st;
}

std::vector<AgentState> assemble_states(const World& w) {
  std::vector<AgentState> out;
  for (int a = 0; a < w.num_agents(); ++a) out.push_back(assemble_state(w, a));
  return out;
}

ProjectedActions project_actions(std::span<const HybridAction> raw, const World& w) {
  const Scenario& s = w.sc;
  if (static_cast<int>(raw.size()) != w.num_agents())
    throw std::invalid_argument("expected one action per agent");
  ProjectedActions out;
  const int m = s.num_elements;

  for (int i = 0; i < s.num_ris; ++i) {
    const HybridAction& a = raw[i];
    const ActionSpec spec = action_spec(w, i);
    if (static_cast<int>(a.continuous.size()) != spec.continuous_dim ||
        a.discrete.size() != spec.head_sizes.size())
      throw std::invalid_argument("surface action has the wrong size");
    AmRisConfig c = AmRisConfig::uniform(m, 1, 1.0, 0.0);
    const double beta_floor = 1e-6 * s.beta_max;
    for (int e = 0; e < m; ++e) {
      c.beta[e] = std::max(beta_floor, s.beta_max * (unit(a.continuous[e]) + 1.0) / 2.0);
      double th = kPi * (unit(a.continuous[m + e]) + 1.0);
      if (th >= kTwoPi) th -= kTwoPi;
      c.theta[e] = th;
      c.alpha[e] = spec.fixed[e] >= 0 ? spec.fixed[e] : clamp_code(a.discrete[e], 2);
    }
    out.configs.push_back(std::move(c));
    const int move = clamp_code(a.discrete[m], kNumAavMoves);
    out.commanded_velocity.push_back(aav_move_velocity(static_cast<AavMove>(move), s.limits.v_max));
  }

  const HybridAction& b = raw[s.num_ris];
  const ActionSpec spec = action_spec(w, s.num_ris);
  if (static_cast<int>(b.continuous.size()) != spec.continuous_dim ||
      b.discrete.size() != spec.head_sizes.size())
    throw std::invalid_argument("BS action has the wrong size");
  const double amp = std::sqrt(s.p_bs);
  out.vars.w.assign(s.num_dl, CVec::Zero(s.num_tx));
  for (int k = 0; k < s.num_dl; ++k)
    for (int n = 0; n < s.num_tx; ++n) {
      const int idx = 2 * (k * s.num_tx + n);
      out.vars.w[k][n] = cdouble{amp * unit(b.continuous[idx]), amp * unit(b.continuous[idx + 1])};
    }
  const double total = out.vars.bs_power();
  if (total > s.p_bs) {
    const double f = s.bf_projection == BeamformingProjection::kSqrt ? std::sqrt(s.p_bs / total)
                                                                      : s.p_bs / total;
    for (auto& wk : out.vars.w) wk *= f;
    // Rounding can leave the sum an ulp above the budget.
    for (int guard = 0; guard < 8 && out.vars.bs_power() > s.p_bs; ++guard)
      for (auto& wk : out.vars.w) wk *= 1.0 - 0x1.0p-52;
  }
  const int w_dim = 2 * s.num_tx * s.num_dl;
  out.vars.p.resize(s.num_ul);
  for (int k = 0; k < s.num_ul; ++k)
    out.vars.p[k] = s.p_ul * (unit(b.continuous[w_dim + k]) + 1.0) / 2.0;

  out.fa_moves.resize(spec.head_sizes.size());
  for (std::size_t e = 0; e < out.fa_moves.size(); ++e)
    out.fa_moves[e] = spec.fixed[e] >= 0 ? spec.fixed[e] : clamp_code(b.discrete[e], kNumFaMoves);
  return out;
}

SlotEvaluation evaluate(const World& w) {
  const Scenario& s = w.sc;
  const ChannelSet& ch = w.channels;
  std::vector<CRow> h_t;
  std::vector<CVec> h_r;
  for (int k = 0; k < s.num_dl; ++k) h_t.push_back(cascade_dl(ch, w.configs, k));
  for (int k = 0; k < s.num_ul; ++k) h_r.push_back(cascade_ul(ch, w.configs, k));
  const EffectiveSi eff = effective_si(ch, w.configs);

  SlotEvaluation ev;
  for (int k = 0; k < s.num_dl; ++k) ev.rates_dl.push_back(rate(dl_sinr(k, w.vars, eff, h_t, s.noise)));
  for (int k = 0; k < s.num_ul; ++k) ev.rates_ul.push_back(rate(ul_sinr(k, w.vars, eff, h_r, s.noise)));

  std::vector<double> totals;
  for (int i = 0; i < s.num_ris; ++i) {
    const MfrisPower mf = mfris_power(i, w.vars, ch, w.configs, s.ris_power, s.eh, s.noise.ris);
    RisPowerSplit split;
    split.mechanical = aav_power(w.aav[i].velocity.norm(), s.aav);
    split.circuit = mf.circuit;
    split.amplifier = mf.amplifier;
    split.harvested = mf.harvested;
    split.total = split.mechanical + mf.total;
    totals.push_back(split.total);
    ev.ris.push_back(split);
  }
  ev.ee = energy_efficiency(ev.rates_dl, ev.rates_ul, totals, w.vars);
  return ev;
}

RewardResult compute_reward(const World& w) {
  const Scenario& s = w.sc;
  RewardResult r;
  r.eval = evaluate(w);
  r.ee = r.eval.ee;
  auto& c = r.penalties.c;
  for (double v : r.eval.rates_dl) c[0] += std::max(0.0, s.rate_th_dl - v);
  for (double v : r.eval.rates_ul) c[1] += std::max(0.0, s.rate_th_ul - v);
  double sum_p = 0.0;
  for (const auto& split : r.eval.ris) sum_p += split.total;
  c[2] = std::max(0.0, sum_p - s.p_max);
  std::vector<Vec3> pos;
  for (const auto& a : w.aav) pos.push_back(a.position);
  c[3] = pairwise_separation_violation(pos, s.d_min);
  const auto [intra, inter] = fa_spacing_deficits(w.fa_requested, s.fa_spacing);
  c[4] = intra;
  c[5] = inter;
  r.penalties.rho = s.rho;
  r.reward = r.ee - r.penalties.weighted();
  return r;
}

StepResult step(World& w, std::span<const HybridAction> actions) {
  const Scenario& s = w.sc;
  ProjectedActions proj = project_actions(actions, w);
  w.configs = std::move(proj.configs);
  w.vars = std::move(proj.vars);
  for (int i = 0; i < s.num_ris; ++i)
    w.aav[i] = propagate_aav(w.aav[i], proj.commanded_velocity[i], s.tau, s.limits);
  w.fa_requested = fa_apply_moves_unchecked(w.fa, proj.fa_moves);
  w.fa = fa_apply_moves(w.fa, proj.fa_moves, s.fa_spacing);
  w.channels = draw_channels(w.topology(), s.channel, w.channel_rng);

  const RewardResult rr = compute_reward(w);
  w.slot += 1;

  StepResult out;
  out.reward = rr.reward;
  MetricsRecord& rec = out.record;
  rec.slot = w.slot;
  rec.episode = w.episode;
  rec.ee = rr.ee;
  rec.reward = rr.reward;
  rec.rates_dl = rr.eval.rates_dl;
  rec.rates_ul = rr.eval.rates_ul;
  for (double v : rec.rates_dl) rec.sum_rate_dl += v;
  for (double v : rec.rates_ul) rec.sum_rate_ul += v;
  rec.bs_power = w.vars.bs_power();
  rec.ul_power = w.vars.ul_power();
  rec.ris = rr.eval.ris;
  rec.penalties = rr.penalties;
  out.next_states = assemble_states(w);
  return out;
}

}  // namespace amris
