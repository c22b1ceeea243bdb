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

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace amris {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class DuplexMode { kFull, kDownlinkOnly, kUplinkOnly };
enum class FaMode { kFull, kPartial, kRigid };
enum class BeamformingProjection { kSqrt, kPrinted };

// Every scenario and learning knob. Powers are in W unless the key says dB or
// dBm; distances in m. Defaults are the desk profile.
struct ScenarioConfig {
  // network
  int num_ris = 2;
  int ris_mx = 4;
  int ris_my = 2;
  int num_dl_users = 2;
  int num_ul_users = 2;
  int num_tx = 4;
  int num_rx = 4;
  double h0_db = -20.0;
  double kappa0 = 2.2;
  double rician_db = 3.0;
  double rician_si_db = 20.0;
  double p_bs = 40.0;
  double p_max = 100.0;
  double p_ul = 1.0;
  double noise_dbm = -80.0;
  double rate_th_dl = 1.0;
  double rate_th_ul = 1.0;
  double carrier_hz = 3.5e9;
  double area_x = 500.0;
  double area_y = 500.0;
  double bs_x = 250.0;
  double bs_y = 250.0;
  double bs_height = 25.0;
  double user_height = 1.5;

  // aerial vehicles
  double weight_aav = 20.0;
  double p_bp = 79.0;
  double p_ip = 88.0;
  double z_min = 50.0;
  double z_max = 500.0;
  double ris_init_height = 100.0;
  double ris_init_radius = 100.0;
  double d_min = 6.0;
  double v_max = 15.0;
  double a_max = 1.0;
  double tau = 1.0;
  double omega_b = 300.0;
  double omega_r = 0.4;
  double v_r = 4.0;
  double zeta_d = 0.3;
  double zeta_a = 1.225;
  double zeta_s = 0.05;
  double zeta_r = 0.5;
  double zeta_c = 0.1;
  double b1 = 12.08;
  double b2 = 0.11;

  // fluid antennas
  double fa_length_x = 1.0;
  double fa_length_y = 1.0;
  double fa_resolution = 0.02;
  double d_th1 = 0.05;
  double d_th2 = 0.1;

  // multi-functional surface
  double weight_ris = 10.0;  // N, for the reference 32-element surface
  double p_ph = 0.005;
  double p_hc = 0.05;
  double p_am = 0.1;
  double beta_max = 3.0;
  double varsigma_pa = 1.1;
  double z1 = 0.024;
  double c1 = 150.0;
  double c2 = 0.014;

  // learning
  int meta_period = 5;
  int replay_capacity = 128;
  int batch_size = 64;
  double rho1 = 5e-4;
  double rho2 = 5e-4;
  double rho3 = 5e-4;
  double rho4 = 3e-5;
  double rho5 = 3e-5;
  double rho6 = 3e-5;
  double lambda_c = 3e-4;
  double eps_xi = 1e-6;
  int num_heads = 4;
  int d_k = 64;
  int t_xi = 5;
  int t_up = 10;
  int attention_out = 16;
  int hidden = 128;
  int hidden_layers = 2;
  double dropout = 0.0;
  int ppo_epochs = 4;
  double log_std_init = -1.2039728043259361;  // ln 0.3
  double meta_step_fraction = 0.05;
  int meta_batch = 4;
  double meta_lr = 1e-3;
  double meta_gamma = 0.9;
  double meta_clip = 0.2;
  double grad_clip = 10.0;  // 0 disables

  // run
  int episode_length = 200;
  int total_slots = 2000;
  std::uint64_t seed = 1;

  // ablations and interpretation switches
  bool attention = true;
  bool meta = true;
  double meta_fraction = 1.0;
  double eh_ratio = 0.0;
  DuplexMode duplex = DuplexMode::kFull;
  FaMode fa_mode = FaMode::kFull;
  bool los_probability = true;
  bool los_sign_conventional = false;
  int parasite_exponent = 2;
  bool induced_from_weight = false;
  BeamformingProjection bf_projection = BeamformingProjection::kSqrt;

  int num_elements() const { return ris_mx * ris_my; }
  int active_dl_users() const { return duplex == DuplexMode::kUplinkOnly ? 0 : num_dl_users; }
  int active_ul_users() const { return duplex == DuplexMode::kDownlinkOnly ? 0 : num_ul_users; }
};

// "desk" (small, CI-sized) or "paper" (the full reference scenario).
ScenarioConfig profile_defaults(const std::string& profile);

// key = value text, '#' starts a comment. Unknown keys and out-of-range
// values raise ConfigError.
ScenarioConfig parse_config(const std::string& text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {});
std::string serialize_config(const ScenarioConfig& cfg);

void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const ScenarioConfig& cfg, const std::string& key);
std::vector<std::string> config_keys();

// Throws ConfigError describing the first violated range.
void validate(const ScenarioConfig& cfg);

}  // namespace amris
