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


// The per-slot decision process: who sees what, how raw policy outputs become
// physical settings, and what the shared reward is.

#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "amris/channel.hpp"
#include "amris/config.hpp"
#include "amris/energy.hpp"
#include "amris/geometry.hpp"
#include "amris/rng.hpp"
#include "amris/signal.hpp"

namespace amris {

// Physical constants of one scenario in linear units.
struct Scenario {
  ChannelParams channel;
  AavPowerParams aav;
  EhParams eh;
  RisPowerParams ris_power;
  NoisePowers noise;
  AavLimits limits;
  FaSpacing fa_spacing;
  int num_ris = 0;
  int num_elements = 0;
  int num_tx = 0;
  int num_rx = 0;
  int num_dl = 0;
  int num_ul = 0;
  double beta_max = 3.0;
  double p_bs = 40.0;
  double p_ul = 1.0;
  double p_max = 100.0;
  double rate_th_dl = 1.0;
  double rate_th_ul = 1.0;
  double tau = 1.0;
  double d_min = 6.0;
  std::array<double, 6> rho{};
  BeamformingProjection bf_projection = BeamformingProjection::kSqrt;

  static Scenario from_config(const ScenarioConfig& cfg);
};

// Agents 0..I-1 are the surfaces, agent I is the BS.
struct AgentState {
  int agent_id = 0;
  Eigen::MatrixXd tokens;  // one row per user, DL users first
};

struct HybridAction {
  int agent_id = 0;
  std::vector<double> continuous;
  std::vector<int> discrete;
};

// Shape of one agent's action space. fixed[h] >= 0 pins head h to that code.
struct ActionSpec {
  int continuous_dim = 0;
  std::vector<int> head_sizes;
  std::vector<int> fixed;
  int num_tokens = 0;
  int token_dim = 0;
};

struct PenaltyBreakdown {
  std::array<double, 6> c{};
  std::array<double, 6> rho{};
  double weighted() const;
};

struct RisPowerSplit {
  double mechanical = 0.0;
  double circuit = 0.0;
  double amplifier = 0.0;
  double harvested = 0.0;
  double total = 0.0;  // mechanical + surface consumption
};

struct MetricsRecord {
  int slot = 0;
  int episode = 0;
  double ee = 0.0;
  double reward = 0.0;
  double sum_rate_dl = 0.0;
  double sum_rate_ul = 0.0;
  double bs_power = 0.0;
  double ul_power = 0.0;
  std::vector<double> rates_dl;
  std::vector<double> rates_ul;
  std::vector<RisPowerSplit> ris;
  PenaltyBreakdown penalties;
};

struct World {
  Scenario sc;
  Vec3 bs;
  double area_x = 500.0;
  double area_y = 500.0;
  double user_height = 1.5;
  std::vector<AavState> aav;
  FaLayout fa;
  FaLayout fa_requested;  // layout the last moves asked for, before feasibility
  std::vector<Vec3> dl_users;
  std::vector<Vec3> ul_users;
  std::vector<AmRisConfig> configs;
  TransmitVars vars;
  ChannelSet channels;
  std::vector<std::vector<int>> eh_forced;  // [i][m] = 1 pins element m to harvesting
  std::vector<int> fa_fluid;                // Tx then Rx, 1 = movable
  Rng channel_rng;
  Rng user_rng;
  int slot = 0;
  int episode = 0;

  int num_agents() const { return sc.num_ris + 1; }
  int bs_agent() const { return sc.num_ris; }
  NetworkTopology topology() const;
};

// Builds the initial world: vehicles on a ring around the BS, default FA
// grid, all elements reflecting with unit gain, first users and channels.
World make_world(const ScenarioConfig& cfg);

// New user drop for an episode, followed by a fresh channel draw.
void reset_episode(World& world, int episode);

ActionSpec action_spec(const World& world, int agent_id);

AgentState assemble_state(const World& world, int agent_id);
std::vector<AgentState> assemble_states(const World& world);

struct ProjectedActions {
  std::vector<AmRisConfig> configs;
  TransmitVars vars;
  std::vector<Vec3> commanded_velocity;
  std::vector<int> fa_moves;  // Tx then Rx
};

// Maps [-1, 1] policy outputs and integer codes onto the feasible sets.
// Out-of-range codes are clamped; pinned heads take their pinned code.
ProjectedActions project_actions(std::span<const HybridAction> raw, const World& world);

// Rates, powers and efficiency of the current world state.
struct SlotEvaluation {
  std::vector<double> rates_dl;
  std::vector<double> rates_ul;
  std::vector<RisPowerSplit> ris;
  double ee = 0.0;
};

SlotEvaluation evaluate(const World& world);

struct RewardResult {
  double reward = 0.0;
  double ee = 0.0;
  PenaltyBreakdown penalties;
  SlotEvaluation eval;
};

RewardResult compute_reward(const World& world);

struct StepResult {
  std::vector<AgentState> next_states;
  double reward = 0.0;
  MetricsRecord record;
};

StepResult step(World& world, std::span<const HybridAction> actions);

}  // namespace amris
