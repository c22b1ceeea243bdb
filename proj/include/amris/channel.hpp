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

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "amris/geometry.hpp"
#include "amris/rng.hpp"

namespace amris {

using cdouble = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// All quantities are linear; dB conversion happens when a scenario is built.
struct ChannelParams {
  double h0 = 0.01;          // reference gain at 1 m
  double kappa0 = 2.2;       // pathloss exponent
  double rician = 1.9952623149688795;  // 3 dB
  double rician_si = 100.0;  // 20 dB
  double wavelength = 299792458.0 / 3.5e9;
  double b1 = 12.08;
  double b2 = 0.11;
  // +1 reproduces the LoS-probability exponent as printed in the source
  // model; -1 gives the usual urban-AAV convention (LoS likelier when high).
  double los_exponent_sign = 1.0;
  bool use_los_probability = true;
  int ris_mx = 4;
  int ris_my = 2;
  double ris_spacing = 299792458.0 / 3.5e9 / 2.0;  // d_A
};

// Per-element configuration of one multi-functional surface. alpha = 1 is the
// reflect/amplify mode, alpha = 0 the harvesting mode.
struct AmRisConfig {
  std::vector<int> alpha;
  std::vector<double> beta;
  std::vector<double> theta;

  static AmRisConfig uniform(int m, int alpha, double beta, double theta);
  int size() const { return static_cast<int>(alpha.size()); }
  // Diagonal of Theta: alpha * sqrt(beta) * exp(j theta).
  CVec diagonal() const;
};

std::vector<CVec> ris_diagonals(std::span<const AmRisConfig> configs);

// Where everything is for one slot.
struct NetworkTopology {
  Vec3 bs;
  std::vector<Vec3> ris;
  FaLayout fa;
  std::vector<Vec3> dl_users;
  std::vector<Vec3> ul_users;
};

// Every random channel of one slot.
//   d_t[i]        M x N_T, BS Tx -> surface i
//   d_r[i]        N_R x M, surface i -> BS Rx
//   g_dl[i][k]    M, surface i <-> DL user k (g_ul likewise for UL users)
//   h_inter[i][j] M x M, surface i -> surface j (empty when i == j)
//   s_si          N_R x N_T, direct self-interference
//   h_uu(k, k')   DL user k <- UL user k'
struct ChannelSet {
  std::vector<CMat> d_t;
  std::vector<CMat> d_r;
  std::vector<std::vector<CVec>> g_dl;
  std::vector<std::vector<CVec>> g_ul;
  std::vector<std::vector<CMat>> h_inter;
  CMat s_si;
  CMat h_uu;

  int num_ris() const { return static_cast<int>(d_t.size()); }
  int num_elements() const { return d_t.empty() ? 0 : static_cast<int>(d_t.front().rows()); }
  int num_tx() const { return static_cast<int>(s_si.cols()); }
  int num_rx() const { return static_cast<int>(s_si.rows()); }
  int num_dl() const { return static_cast<int>(h_uu.rows()); }
  int num_ul() const { return static_cast<int>(h_uu.cols()); }
};

// FA array response, entry n = exp(j k . x_n) with
// k = (2 pi / lambda) [sin psi sin theta, sin psi cos theta, cos psi].
CVec fa_array_response(std::span<const Vec3> elements, const AngleSet& angles, double wavelength);

// Planar surface steering vector, Kronecker product of the x and y phase
// progressions; entry index is mx * M_y + my.
CVec ris_steering(int m_x, int m_y, double spacing, const AngleSet& angles, double wavelength);

// sqrt(h0 d^-kappa0) (sqrt(K/(1+K)) LoS + sqrt(1/(1+K)) NLoS), NLoS entries
// CN(0, 1). Without a LoS path the scattered part carries all the power.
CMat draw_rician(int rows, int cols, double distance, const CMat& los, double h0, double kappa0,
                 double rician, Rng& rng, bool los_present = true);

// 1 / (1 + b1 exp(sign * b2 (elevation - b1))), elevation in degrees.
double los_probability(double elevation_deg, double b1, double b2, double sign = 1.0);

// Draws the full channel set for the given topology.
ChannelSet draw_channels(const NetworkTopology& topo, const ChannelParams& params, Rng& rng);

// Combined BS -> DL user k channel (1 x N_T), first- and second-order paths.
CRow cascade_dl(const ChannelSet& ch, std::span<const AmRisConfig> configs, int k);

// Combined UL user k -> BS channel (N_R x 1).
CVec cascade_ul(const ChannelSet& ch, std::span<const AmRisConfig> configs, int k);

struct EffectiveSi {
  CMat f_bar;                           // N_R x N_T
  std::vector<CMat> f_r;                // per surface, N_R x M
  std::vector<std::vector<CRow>> f_dl;  // [i][k], 1 x M
  CMat f_uu;                            // K_D x K_U
};

EffectiveSi effective_si(const ChannelSet& ch, std::span<const AmRisConfig> configs);

}  // namespace amris
