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

#include <cmath>
#include <span>
#include <vector>

#include "amris/channel.hpp"
#include "amris/signal.hpp"

namespace amris {

// Rotary-wing propulsion constants. p_bp and p_ip are the hover blade-profile
// and induced powers; the zeta_* are fuselage drag ratio, air density, rotor
// solidity, rotor disk area and induced-power correction.
struct AavPowerParams {
  double p_bp = 79.0;
  double p_ip = 88.0;
  double omega_b = 300.0;  // blade angular velocity, rad/s
  double omega_r = 0.4;    // rotor radius, m
  double v_r = 4.0;        // mean rotor induced velocity, m/s
  double zeta_d = 0.3;
  double zeta_a = 1.225;
  double zeta_s = 0.05;
  double zeta_r = 0.5;
  double zeta_c = 0.1;
  double weight_aav = 20.0;                 // N
  double weight_ris_per_element = 10.0 / 32.0;  // N
  // Parasite term exponent on speed: 2 as in the reference model, 3 for the
  // conventional form.
  int parasite_exponent = 2;
  // When set, p_ip is recomputed from the total weight instead of taken as is.
  bool induced_from_weight = false;
};

double aav_power(double speed, const AavPowerParams& params);

// Hover blade-profile power from the profile drag coefficient.
double blade_profile_power(double zeta_p, const AavPowerParams& params);

// Hover induced power for a total weight in Newton.
double induced_hover_power(double weight, const AavPowerParams& params);

// Params with p_ip replaced by the weight-derived value when requested.
AavPowerParams with_weight(AavPowerParams params, int num_elements);

struct EhParams {
  double z1 = 0.024;  // W
  double c1 = 150.0;
  double c2 = 0.014;

  double z2() const { return 1.0 / (1.0 + std::exp(c1 * c2)); }
};

struct RisPowerParams {
  double p_ph = 0.005;
  double p_am = 0.1;
  double p_hc = 0.05;
  double varsigma_pa = 1.1;
};

// Expected incident power per element of surface i (before the harvesting
// mask). Data symbols of different users and the surface noise are treated
// as independent, so powers add.
Eigen::VectorXd incident_power(int i, const TransmitVars& vars, const ChannelSet& ch,
                               std::span<const AmRisConfig> configs, double noise_ris);

// RF power reaching element m of surface i when it is in harvesting mode.
double rf_power_received(int i, int m, const TransmitVars& vars, const ChannelSet& ch,
                         std::span<const AmRisConfig> configs, double noise_ris);

// Nonlinear harvester output, zero at zero input and below z1 everywhere.
double harvested_power(double p_rf, const EhParams& eh);

struct MfrisPower {
  double circuit = 0.0;    // phase/amplitude control plus EH conversion circuits
  double amplifier = 0.0;  // varsigma_PA * P_out
  double harvested = 0.0;
  double total = 0.0;      // max(0, circuit + amplifier - harvested)
};

MfrisPower mfris_power(int i, const TransmitVars& vars, const ChannelSet& ch,
                       std::span<const AmRisConfig> configs, const RisPowerParams& params,
                       const EhParams& eh, double noise_ris);

// Sum rate over total consumed power, bits/Hz/J.
double energy_efficiency(std::span<const double> rates_dl, std::span<const double> rates_ul,
                         std::span<const double> per_ris_total_power, const TransmitVars& vars);

}  // namespace amris
