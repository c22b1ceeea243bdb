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

#include <span>
#include <vector>

#include "amris/channel.hpp"

namespace amris {

// BS beamformers (one N_T vector per DL user, sqrt(W) units) and UL powers (W).
struct TransmitVars {
  std::vector<CVec> w;
  std::vector<double> p;

  double bs_power() const;
  double ul_power() const;
};

struct NoisePowers {
  double bs = 1e-11;    // sigma^2 at the BS receiver
  double ris = 1e-11;   // sigma-bar^2 per surface element
  double user = 1e-11;  // sigma_k^2 at a DL user
};

// UL SINR of user k at the BS:
//   p_k |h_R,k|^2 / (sum_DL |F w|^2 + sum_i sigma_ris^2 |F_R,i|_F^2 + sigma^2)
double ul_sinr(int k, const TransmitVars& vars, const EffectiveSi& eff, std::span<const CVec> h_r,
               const NoisePowers& noise);

// DL SINR of user k with intra-DL interference, surface-induced UL-user
// interference and amplified surface noise in the denominator.
double dl_sinr(int k, const TransmitVars& vars, const EffectiveSi& eff, std::span<const CRow> h_t,
               const NoisePowers& noise);

// Achievable rate in bits/s/Hz.
double rate(double sinr);

}  // namespace amris
