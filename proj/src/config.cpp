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


#include "amris/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

namespace amris {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(d))
    throw ConfigError("bad number '" + v + "'");
  return d;
}

long long parse_int(const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long n = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE)
    throw ConfigError("bad integer '" + v + "'");
  return n;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("bad boolean '" + v + "'");
}

struct Field {
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

using Table = std::vector<std::pair<std::string, Field>>;

template <typename T>
Field number(T ScenarioConfig::*m) {
  Field f;
  if constexpr (std::is_same_v<T, double>) {
    f.set = [m](ScenarioConfig& c, const std::string& v) { c.*m = parse_double(v); };
    f.get = [m](const ScenarioConfig& c) { return format_double(c.*m); };
  } else if constexpr (std::is_same_v<T, bool>) {
    f.set = [m](ScenarioConfig& c, const std::string& v) { c.*m = parse_bool(v); };
    f.get = [m](const ScenarioConfig& c) { return std::string(c.*m ? "true" : "false"); };
  } else {
    f.set = [m](ScenarioConfig& c, const std::string& v) {
      const long long n = parse_int(v);
      if (n < 0 && std::is_unsigned_v<T>) throw ConfigError("negative value '" + v + "'");
      c.*m = static_cast<T>(n);
    };
    f.get = [m](const ScenarioConfig& c) { return std::to_string(c.*m); };
  }
  return f;
}

template <typename E>
Field choice(E ScenarioConfig::*m, std::vector<std::pair<std::string, E>> names) {
  Field f;
  f.set = [m, names](ScenarioConfig& c, const std::string& v) {
    for (const auto& [n, e] : names)
      if (n == v) {
        c.*m = e;
        return;
      }
    throw ConfigError("unknown choice '" + v + "'");
  };
  f.get = [m, names](const ScenarioConfig& c) {
    for (const auto& [n, e] : names)
      if (c.*m == e) return n;
    return std::string("?");
  };
  return f;
}

const Table& table() {
  using C = ScenarioConfig;
  static const Table t = {
      {"num_ris", number(&C::num_ris)},
      {"ris_mx", number(&C::ris_mx)},
      {"ris_my", number(&C::ris_my)},
      {"num_dl_users", number(&C::num_dl_users)},
      {"num_ul_users", number(&C::num_ul_users)},
      {"num_tx", number(&C::num_tx)},
      {"num_rx", number(&C::num_rx)},
      {"h0_db", number(&C::h0_db)},
      {"kappa0", number(&C::kappa0)},
      {"rician_db", number(&C::rician_db)},
      {"rician_si_db", number(&C::rician_si_db)},
      {"p_bs", number(&C::p_bs)},
      {"p_max", number(&C::p_max)},
      {"p_ul", number(&C::p_ul)},
      {"noise_dbm", number(&C::noise_dbm)},
      {"rate_th_dl", number(&C::rate_th_dl)},
      {"rate_th_ul", number(&C::rate_th_ul)},
      {"carrier_hz", number(&C::carrier_hz)},
      {"area_x", number(&C::area_x)},
      {"area_y", number(&C::area_y)},
      {"bs_x", number(&C::bs_x)},
      {"bs_y", number(&C::bs_y)},
      {"bs_height", number(&C::bs_height)},
      {"user_height", number(&C::user_height)},
      {"weight_aav", number(&C::weight_aav)},
      {"p_bp", number(&C::p_bp)},
      {"p_ip", number(&C::p_ip)},
      {"z_min", number(&C::z_min)},
      {"z_max", number(&C::z_max)},
      {"ris_init_height", number(&C::ris_init_height)},
      {"ris_init_radius", number(&C::ris_init_radius)},
      {"d_min", number(&C::d_min)},
      {"v_max", number(&C::v_max)},
      {"a_max", number(&C::a_max)},
      {"tau", number(&C::tau)},
      {"omega_b", number(&C::omega_b)},
      {"omega_r", number(&C::omega_r)},
      {"v_r", number(&C::v_r)},
      {"zeta_d", number(&C::zeta_d)},
      {"zeta_a", number(&C::zeta_a)},
      {"zeta_s", number(&C::zeta_s)},
      {"zeta_r", number(&C::zeta_r)},
      {"zeta_c", number(&C::zeta_c)},
      {"b1", number(&C::b1)},
      {"b2", number(&C::b2)},
      {"fa_length_x", number(&C::fa_length_x)},
      {"fa_length_y", number(&C::fa_length_y)},
      {"fa_resolution", number(&C::fa_resolution)},
      {"d_th1", number(&C::d_th1)},
      {"d_th2", number(&C::d_th2)},
      {"weight_ris", number(&C::weight_ris)},
      {"p_ph", number(&C::p_ph)},
      {"p_hc", number(&C::p_hc)},
      {"p_am", number(&C::p_am)},
      {"beta_max", number(&C::beta_max)},
      {"varsigma_pa", number(&C::varsigma_pa)},
      {"z1", number(&C::z1)},
      {"c1", number(&C::c1)},
      {"c2", number(&C::c2)},
      {"meta_period", number(&C::meta_period)},
      {"replay_capacity", number(&C::replay_capacity)},
      {"batch_size", number(&C::batch_size)},
      {"rho1", number(&C::rho1)},
      {"rho2", number(&C::rho2)},
      {"rho3", number(&C::rho3)},
      {"rho4", number(&C::rho4)},
      {"rho5", number(&C::rho5)},
      {"rho6", number(&C::rho6)},
      {"lambda_c", number(&C::lambda_c)},
      {"eps_xi", number(&C::eps_xi)},
      {"num_heads", number(&C::num_heads)},
      {"d_k", number(&C::d_k)},
      {"t_xi", number(&C::t_xi)},
      {"t_up", number(&C::t_up)},
      {"attention_out", number(&C::attention_out)},
      {"hidden", number(&C::hidden)},
      {"hidden_layers", number(&C::hidden_layers)},
      {"dropout", number(&C::dropout)},
      {"ppo_epochs", number(&C::ppo_epochs)},
      {"log_std_init", number(&C::log_std_init)},
      {"meta_step_fraction", number(&C::meta_step_fraction)},
      {"meta_batch", number(&C::meta_batch)},
      {"meta_lr", number(&C::meta_lr)},
      {"meta_gamma", number(&C::meta_gamma)},
      {"meta_clip", number(&C::meta_clip)},
      {"grad_clip", number(&C::grad_clip)},
      {"episode_length", number(&C::episode_length)},
      {"total_slots", number(&C::total_slots)},
      {"seed", number(&C::seed)},
      {"attention", number(&C::attention)},
      {"meta", number(&C::meta)},
      {"meta_fraction", number(&C::meta_fraction)},
      {"eh_ratio", number(&C::eh_ratio)},
      {"duplex", choice(&C::duplex, std::vector<std::pair<std::string, DuplexMode>>{
                                        {"fd", DuplexMode::kFull},
                                        {"dl", DuplexMode::kDownlinkOnly},
                                        {"ul", DuplexMode::kUplinkOnly}})},
      {"fa_mode", choice(&C::fa_mode, std::vector<std::pair<std::string, FaMode>>{
                                          {"full", FaMode::kFull},
                                          {"partial", FaMode::kPartial},
                                          {"rigid", FaMode::kRigid}})},
      {"los_probability", number(&C::los_probability)},
      {"los_sign_conventional", number(&C::los_sign_conventional)},
      {"parasite_exponent", number(&C::parasite_exponent)},
      {"induced_from_weight", number(&C::induced_from_weight)},
      {"bf_projection",
       choice(&C::bf_projection, std::vector<std::pair<std::string, BeamformingProjection>>{
                                     {"sqrt", BeamformingProjection::kSqrt},
                                     {"printed", BeamformingProjection::kPrinted}})},
  };
  return t;
}

const Field& find(const std::string& key) {
  for (const auto& [k, f] : table())
    if (k == key) return f;
  throw ConfigError("unknown config key '" + key + "'");
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("invalid config: " + msg);
}

}  // namespace

ScenarioConfig profile_defaults(const std::string& profile) {
  ScenarioConfig c;
  if (profile == "desk") return c;
  if (profile == "paper") {
    c.num_ris = 4;
    c.ris_mx = 8;
    c.ris_my = 4;
    c.num_dl_users = 4;
    c.num_ul_users = 4;
    c.num_tx = 16;
    c.num_rx = 16;
    c.total_slots = 20000;
    return c;
  }
  throw ConfigError("unknown profile '" + profile + "'");
}

void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  try {
    find(key).set(cfg, value);
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind("unknown config key", 0) == 0) throw;
    throw ConfigError(key + ": " + what);
  }
}

std::string get_config_value(const ScenarioConfig& cfg, const std::string& key) {
  return find(key).get(cfg);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, f] : table()) out.push_back(k);
  return out;
}

ScenarioConfig parse_config(const std::string& text, ScenarioConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_config_value(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  validate(base);
  return base;
}

ScenarioConfig load_config(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& [k, f] : table()) out += k + " = " + f.get(cfg) + "\n";
  return out;
}

void validate(const ScenarioConfig& c) {
  require(c.num_ris >= 1, "num_ris >= 1");
  require(c.ris_mx >= 1 && c.ris_my >= 1, "ris_mx, ris_my >= 1");
  require(c.num_dl_users >= 0 && c.num_ul_users >= 0, "user counts >= 0");
  require(c.active_dl_users() + c.active_ul_users() >= 1, "at least one active user");
  require(c.num_tx >= 1 && c.num_rx >= 1, "num_tx, num_rx >= 1");
  require(c.kappa0 > 0.0, "kappa0 > 0");
  require(c.p_bs > 0.0 && c.p_max > 0.0 && c.p_ul >= 0.0, "power budgets positive");
  require(c.rate_th_dl >= 0.0 && c.rate_th_ul >= 0.0, "rate thresholds >= 0");
  require(c.carrier_hz > 0.0, "carrier_hz > 0");
  require(c.area_x > 0.0 && c.area_y > 0.0, "area positive");
  require(c.bs_x >= 0.0 && c.bs_x <= c.area_x && c.bs_y >= 0.0 && c.bs_y <= c.area_y,
          "BS inside the area");
  require(c.z_min > 0.0 && c.z_max >= c.z_min, "0 < z_min <= z_max");
  require(c.ris_init_height >= c.z_min && c.ris_init_height <= c.z_max,
          "ris_init_height within [z_min, z_max]");
  require(c.ris_init_radius >= 0.0, "ris_init_radius >= 0");
  require(c.d_min >= 0.0, "d_min >= 0");
  require(c.v_max >= 0.0 && c.a_max >= 0.0 && c.tau > 0.0, "kinematic limits");
  require(c.fa_length_x > 0.0 && c.fa_length_y > 0.0 && c.fa_resolution > 0.0, "FA panel sizes");
  require(c.d_th1 >= 0.0 && c.d_th2 >= 0.0, "FA spacings >= 0");
  require(c.beta_max > 0.0, "beta_max > 0");
  require(c.varsigma_pa >= 0.0 && c.p_ph >= 0.0 && c.p_hc >= 0.0 && c.p_am >= 0.0,
          "surface circuit powers >= 0");
  require(c.z1 > 0.0 && c.c1 > 0.0, "harvester constants positive");
  require(c.meta_period >= 1, "meta_period >= 1");
  require(c.replay_capacity >= 1 && c.batch_size >= 1 && c.batch_size <= c.replay_capacity,
          "1 <= batch_size <= replay_capacity");
  require(c.rho1 >= 0 && c.rho2 >= 0 && c.rho3 >= 0 && c.rho4 >= 0 && c.rho5 >= 0 && c.rho6 >= 0,
          "penalty weights >= 0");
  require(c.lambda_c >= 0.0 && c.eps_xi > 0.0, "meta penalty constants");
  require(c.num_heads >= 1 && c.d_k >= 1 && c.attention_out >= 1, "attention sizes >= 1");
  require(c.t_xi >= 1 && c.t_up >= 1, "t_xi, t_up >= 1");
  require(c.hidden >= 1 && c.hidden_layers >= 0, "hidden sizes");
  require(c.dropout >= 0.0 && c.dropout < 1.0, "0 <= dropout < 1");
  require(c.ppo_epochs >= 1, "ppo_epochs >= 1");
  require(c.meta_step_fraction > 0.0 && c.meta_step_fraction <= 1.0, "0 < meta_step_fraction <= 1");
  require(c.meta_batch >= 1 && c.meta_lr > 0.0, "meta learning constants");
  require(c.meta_gamma >= 0.0 && c.meta_gamma <= 1.0, "0 <= meta_gamma <= 1");
  require(c.meta_clip > 0.0 && c.meta_clip < 1.0, "0 < meta_clip < 1");
  require(c.grad_clip >= 0.0, "grad_clip >= 0");
  require(c.episode_length >= 1 && c.total_slots >= 1, "episode_length, total_slots >= 1");
  require(c.meta_fraction >= 0.0 && c.meta_fraction <= 1.0, "0 <= meta_fraction <= 1");
  require(c.eh_ratio >= 0.0 && c.eh_ratio <= 1.0, "0 <= eh_ratio <= 1");
  require(c.parasite_exponent == 2 || c.parasite_exponent == 3, "parasite_exponent is 2 or 3");
}

}  // namespace amris
