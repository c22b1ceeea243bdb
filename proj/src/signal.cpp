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

#include "amris/signal.hpp"

#include <cmath>

namespace amris {

double TransmitVars::bs_power() const {
  double s = 0.0;
  for (const auto& wk : w) s += wk.squaredNorm();
  return s;
}

double TransmitVars::ul_power() const {
  double s = 0.0;
  for (double pk : p) s += pk;
  return s;
}

double ul_sinr(int k, const TransmitVars& vars, const EffectiveSi& eff, std::span<const CVec> h_r,
               const NoisePowers& noise) {
  double denom = noise.bs;
  for (const auto& wk : vars.w) denom += (eff.f_bar * wk).squaredNorm();
  for (const auto& f : eff.f_r) denom += noise.ris * f.squaredNorm();
  return vars.p[k] * h_r[k].squaredNorm() / denom;
}

double dl_sinr(int k, const TransmitVars& vars, const EffectiveSi& eff, std::span<const CRow> h_t,
               const NoisePowers& noise) {
  const double signal = std::norm((h_t[k] * vars.w[k])(0, 0));
  double denom = noise.user;
  for (std::size_t kp = 0; kp < vars.w.size(); ++kp)
    if (static_cast<int>(kp) != k) denom += std::norm((h_t[k] * vars.w[kp])(0, 0));
  for (std::size_t kp = 0; kp < vars.p.size(); ++kp)
    denom += vars.p[kp] * std::norm(eff.f_uu(k, static_cast<Eigen::Index>(kp)));
  for (const auto& per_user : eff.f_dl) denom += noise.ris * per_user[k].squaredNorm();
  return signal / denom;
}

double rate(double sinr) { return std::log2(1.0 + sinr); }

}  // namespace amris
