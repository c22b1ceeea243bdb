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

#include "amris/energy.hpp"

#include <algorithm>
#include <cmath>

namespace amris {

double aav_power(double speed, const AavPowerParams& q) {
  const double v2 = speed * speed;
  const double v4 = v2 * v2;
  const double blade = q.p_bp * (1.0 + 3.0 * v2 / (q.omega_b * q.omega_b * q.omega_r * q.omega_r));
  const double parasite = 0.5 * q.zeta_d * q.zeta_a * q.zeta_s * q.zeta_r *
                          std::pow(speed, static_cast<double>(q.parasite_exponent));
  const double vr2 = q.v_r * q.v_r;
  const double inner = std::sqrt(1.0 + v4 / (4.0 * vr2 * vr2)) - v2 / (2.0 * vr2);
  const double induced = q.p_ip * std::sqrt(std::max(0.0, inner));
  return blade + parasite + induced;
}

double blade_profile_power(double zeta_p, const AavPowerParams& q) {
  return 0.125 * zeta_p * q.zeta_a * q.zeta_s * q.zeta_r * std::pow(q.omega_b, 3) *
         std::pow(q.omega_r, 3);
}

double induced_hover_power(double weight, const AavPowerParams& q) {
  return (1.0 + q.zeta_c) * std::pow(weight, 1.5) / std::sqrt(2.0 * q.zeta_a * q.zeta_r);
}

AavPowerParams with_weight(AavPowerParams params, int num_elements) {
  if (params.induced_from_weight)
    params.p_ip = induced_hover_power(
        params.weight_aav + params.weight_ris_per_element * num_elements, params);
  return params;
}

namespace {

// D-bar_i w_k for every DL user and g-bar_{i,k} for every UL user: direct
// incidence plus what the other surfaces reflect towards surface i.
struct Incident {
  std::vector<CVec> dl;
  std::vector<CVec> ul;
};

Incident incident_fields(int i, const TransmitVars& vars, const ChannelSet& ch,
                         const std::vector<CVec>& theta) {
  const int n_ris = ch.num_ris();
  CMat d_bar = ch.d_t[i];
  for (int j = 0; j < n_ris; ++j)
    if (j != i) d_bar += ch.h_inter[j][i] * theta[j].asDiagonal() * ch.d_t[j];

  Incident out;
  for (const auto& wk : vars.w) out.dl.push_back(d_bar * wk);
  for (int k = 0; k < ch.num_ul(); ++k) {
    CVec g_bar = ch.g_ul[i][k];
    for (int j = 0; j < n_ris; ++j)
      if (j != i) g_bar += ch.h_inter[j][i] * theta[j].asDiagonal() * ch.g_ul[j][k];
    out.ul.push_back(std::sqrt(vars.p[k]) * g_bar);
  }
  return out;
}

}  // namespace

Eigen::VectorXd incident_power(int i, const TransmitVars& vars, const ChannelSet& ch,
                               std::span<const AmRisConfig> configs, double noise_ris) {
  const auto theta = ris_diagonals(configs);
  const Incident inc = incident_fields(i, vars, ch, theta);
  Eigen::VectorXd pw = Eigen::VectorXd::Constant(ch.num_elements(), noise_ris);
  for (const auto& v : inc.dl) pw += v.cwiseAbs2();
  for (const auto& v : inc.ul) pw += v.cwiseAbs2();
  return pw;
}

double rf_power_received(int i, int m, const TransmitVars& vars, const ChannelSet& ch,
                         std::span<const AmRisConfig> configs, double noise_ris) {
  const double mask = 1.0 - configs[i].alpha[m];
  if (mask == 0.0) return 0.0;
  return mask * incident_power(i, vars, ch, configs, noise_ris)[m];
}

double harvested_power(double p_rf, const EhParams& eh) {
  const double z2 = eh.z2();
  // Same rounding as z2 so that zero input gives exactly zero.
  const double gamma = eh.z1 * (1.0 / (1.0 + std::exp(-eh.c1 * (p_rf - eh.c2))));
  return std::max(0.0, (gamma - eh.z1 * z2) / (1.0 - z2));
}

MfrisPower mfris_power(int i, const TransmitVars& vars, const ChannelSet& ch,
                       std::span<const AmRisConfig> configs, const RisPowerParams& params,
                       const EhParams& eh, double noise_ris) {
  const auto theta = ris_diagonals(configs);
  const AmRisConfig& cfg = configs[i];
  const int m = cfg.size();
  const Incident inc = incident_fields(i, vars, ch, theta);

  Eigen::VectorXd incident = Eigen::VectorXd::Constant(m, noise_ris);
  for (const auto& v : inc.dl) incident += v.cwiseAbs2();
  for (const auto& v : inc.ul) incident += v.cwiseAbs2();

  MfrisPower out;
  int active = 0;
  for (int e = 0; e < m; ++e) {
    active += cfg.alpha[e];
    const double p_rf = (1.0 - cfg.alpha[e]) * incident[e];
    out.harvested += harvested_power(p_rf, eh);
  }
  out.circuit = active * (params.p_ph + params.p_am) + (m - active) * params.p_hc;

  const CVec& th = theta[i];
  double p_out = noise_ris * th.squaredNorm();
  for (const auto& v : inc.dl) p_out += th.cwiseProduct(v).squaredNorm();
  for (const auto& v : inc.ul) p_out += th.cwiseProduct(v).squaredNorm();
  out.amplifier = params.varsigma_pa * p_out;
  out.total = std::max(0.0, out.circuit + out.amplifier - out.harvested);
  return out;
}

double energy_efficiency(std::span<const double> rates_dl, std::span<const double> rates_ul,
                         std::span<const double> per_ris_total_power, const TransmitVars& vars) {
  double num = 0.0;
  for (double r : rates_dl) num += r;
  for (double r : rates_ul) num += r;
  double den = vars.bs_power() + vars.ul_power();
  for (double p : per_ris_total_power) den += p;
  return num / den;
}

}  // namespace amris
