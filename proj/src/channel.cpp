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

#include "amris/channel.hpp"

#include <cmath>

namespace amris {

namespace {

constexpr cdouble kJ{0.0, 1.0};

// Aerial links use the magnitude of the elevation.
AngleSet aerial(AngleSet a) {
  a.elevation = std::abs(a.elevation);
  return a;
}

bool draw_los(const Vec3& a, const Vec3& b, const ChannelParams& p, Rng& rng) {
  if (!p.use_los_probability) return true;
  const double elev = rad_to_deg(std::abs(angles_between(a, b).elevation));
  return uniform01(rng) < los_probability(elev, p.b1, p.b2, p.los_exponent_sign);
}

Vec3 centroid(std::span<const Vec3> pts) {
  Vec3 c;
  for (const Vec3& p : pts) c += p;
  return pts.empty() ? c : c * (1.0 / static_cast<double>(pts.size()));
}

}  // namespace

AmRisConfig AmRisConfig::uniform(int m, int alpha, double beta, double theta) {
  return AmRisConfig{std::vector<int>(m, alpha), std::vector<double>(m, beta),
                     std::vector<double>(m, theta)};
}

CVec AmRisConfig::diagonal() const {
  CVec d(size());
  for (int m = 0; m < size(); ++m)
    d[m] = static_cast<double>(alpha[m]) * std::sqrt(beta[m]) * std::exp(kJ * theta[m]);
  return d;
}

std::vector<CVec> ris_diagonals(std::span<const AmRisConfig> configs) {
  std::vector<CVec> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(c.diagonal());
  return out;
}

CVec fa_array_response(std::span<const Vec3> elements, const AngleSet& angles,
                       double wavelength) {
  const double k0 = 2.0 * kPi / wavelength;
  const double sp = std::sin(angles.azimuth);
  const Vec3 k{k0 * sp * std::sin(angles.elevation), k0 * sp * std::cos(angles.elevation),
               k0 * std::cos(angles.azimuth)};
  CVec out(static_cast<Eigen::Index>(elements.size()));
  for (std::size_t n = 0; n < elements.size(); ++n) {
    const Vec3& x = elements[n];
    out[static_cast<Eigen::Index>(n)] = std::exp(kJ * (k.x * x.x + k.y * x.y + k.z * x.z));
  }
  return out;
}

CVec ris_steering(int m_x, int m_y, double spacing, const AngleSet& angles, double wavelength) {
  const double k0 = 2.0 * kPi / wavelength * spacing * std::sin(angles.azimuth);
  const double phase_x = k0 * std::sin(angles.elevation);
  const double phase_y = k0 * std::cos(angles.elevation);
  CVec out(m_x * m_y);
  for (int ix = 0; ix < m_x; ++ix)
    for (int iy = 0; iy < m_y; ++iy)
      out[ix * m_y + iy] = std::exp(kJ * (ix * phase_x + iy * phase_y));
  return out;
}

CMat draw_rician(int rows, int cols, double distance, const CMat& los, double h0, double kappa0,
                 double rician, Rng& rng, bool los_present) {
  if (!(distance > 0.0)) throw GeometryError("degenerate geometry");
  const double scale = std::sqrt(h0 * std::pow(distance, -kappa0));
  const double w_los = los_present ? std::sqrt(rician / (1.0 + rician)) : 0.0;
  const double w_nlos = los_present ? std::sqrt(1.0 / (1.0 + rician)) : 1.0;
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMat out(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      const cdouble nlos{re, im};
      const cdouble l = w_los != 0.0 ? los(r, c) : cdouble{};
      out(r, c) = scale * (w_los * l + w_nlos * nlos);
    }
  return out;
}

double los_probability(double elevation_deg, double b1, double b2, double sign) {
  return 1.0 / (1.0 + b1 * std::exp(sign * b2 * (elevation_deg - b1)));
}

ChannelSet draw_channels(const NetworkTopology& topo, const ChannelParams& p, Rng& rng) {
  const int n_ris = static_cast<int>(topo.ris.size());
  const int m = p.ris_mx * p.ris_my;
  const auto& tx = topo.fa.tx_positions;
  const auto& rx = topo.fa.rx_positions;
  const int n_t = static_cast<int>(tx.size());
  const int n_r = static_cast<int>(rx.size());
  const double lam = p.wavelength;

  auto steer = [&](const Vec3& from, const Vec3& to) {
    return ris_steering(p.ris_mx, p.ris_my, p.ris_spacing, aerial(angles_between(from, to)), lam);
  };

  ChannelSet ch;
  ch.d_t.resize(n_ris);
  ch.d_r.resize(n_ris);
  for (int i = 0; i < n_ris; ++i) {
    const Vec3& ri = topo.ris[i];
    const AngleSet bs_to_ris = aerial(angles_between(topo.bs, ri));
    const double d = distance(topo.bs, ri);

    const CMat los_t = steer(ri, topo.bs) * fa_array_response(tx, bs_to_ris, lam).adjoint();
    const bool los_t_on = draw_los(topo.bs, ri, p, rng);
    ch.d_t[i] = draw_rician(m, n_t, d, los_t, p.h0, p.kappa0, p.rician, rng, los_t_on);

    const CMat los_r = fa_array_response(rx, bs_to_ris, lam) * steer(ri, topo.bs).adjoint();
    const bool los_r_on = draw_los(topo.bs, ri, p, rng);
    ch.d_r[i] = draw_rician(n_r, m, d, los_r, p.h0, p.kappa0, p.rician, rng, los_r_on);
  }

  auto draw_user_links = [&](const std::vector<Vec3>& users, std::vector<std::vector<CVec>>& out) {
    out.assign(n_ris, {});
    for (int i = 0; i < n_ris; ++i)
      for (const Vec3& u : users) {
        const CMat los = steer(topo.ris[i], u);
        const bool on = draw_los(topo.ris[i], u, p, rng);
        out[i].push_back(
            draw_rician(m, 1, distance(topo.ris[i], u), los, p.h0, p.kappa0, p.rician, rng, on)
                .col(0));
      }
  };
  draw_user_links(topo.dl_users, ch.g_dl);
  draw_user_links(topo.ul_users, ch.g_ul);

  ch.h_inter.assign(n_ris, std::vector<CMat>(n_ris));
  for (int i = 0; i < n_ris; ++i)
    for (int j = 0; j < n_ris; ++j) {
      if (i == j) continue;
      const Vec3& a = topo.ris[i];
      const Vec3& b = topo.ris[j];
      const CMat los = steer(b, a) * steer(a, b).adjoint();
      const bool on = draw_los(a, b, p, rng);
      ch.h_inter[i][j] = draw_rician(m, m, distance(a, b), los, p.h0, p.kappa0, p.rician, rng, on);
    }

  {
    const Vec3 ct = centroid(tx);
    const Vec3 cr = centroid(rx);
    CMat los = CMat::Ones(n_r, n_t);
    double d = 1.0;
    if (n_t > 0 && n_r > 0) {
      const AngleSet a = angles_between(ct, cr);
      los = fa_array_response(rx, a, lam) * fa_array_response(tx, a, lam).adjoint();
      d = distance(ct, cr);
    }
    ch.s_si = draw_rician(n_r, n_t, d, los, p.h0, p.kappa0, p.rician_si, rng, true);
  }

  const int k_d = static_cast<int>(topo.dl_users.size());
  const int k_u = static_cast<int>(topo.ul_users.size());
  ch.h_uu.resize(k_d, k_u);
  for (int k = 0; k < k_d; ++k)
    for (int kp = 0; kp < k_u; ++kp)
      ch.h_uu(k, kp) = draw_rician(1, 1, distance(topo.dl_users[k], topo.ul_users[kp]),
                                   CMat::Zero(1, 1), p.h0, p.kappa0, p.rician, rng, false)(0, 0);
  return ch;
}

namespace {

// f_{i,k} = g_{i,k}^H Theta_i + sum_{j != i} g_{j,k}^H Theta_j H_{i,j} Theta_i
CRow user_effective(const ChannelSet& ch, const std::vector<CVec>& theta,
                    const std::vector<std::vector<CVec>>& g, int i, int k) {
  const int n_ris = ch.num_ris();
  CRow acc = g[i][k].adjoint();
  for (int j = 0; j < n_ris; ++j) {
    if (j == i) continue;
    CRow via = g[j][k].adjoint().cwiseProduct(theta[j].transpose());
    acc += via * ch.h_inter[i][j];
  }
  return acc.cwiseProduct(theta[i].transpose());
}

// F_{R,i} = D_{R,i} Theta_i + sum_{j != i} D_{R,j} Theta_j H_{i,j} Theta_i
CMat rx_effective(const ChannelSet& ch, const std::vector<CVec>& theta, int i) {
  CMat acc = ch.d_r[i];
  for (int j = 0; j < ch.num_ris(); ++j) {
    if (j == i) continue;
    acc += ch.d_r[j] * theta[j].asDiagonal() * ch.h_inter[i][j];
  }
  return acc * theta[i].asDiagonal();
}

}  // namespace

CRow cascade_dl(const ChannelSet& ch, std::span<const AmRisConfig> configs, int k) {
  const auto theta = ris_diagonals(configs);
  CRow h = CRow::Zero(ch.num_tx());
  for (int i = 0; i < ch.num_ris(); ++i) h += user_effective(ch, theta, ch.g_dl, i, k) * ch.d_t[i];
  return h;
}

CVec cascade_ul(const ChannelSet& ch, std::span<const AmRisConfig> configs, int k) {
  const auto theta = ris_diagonals(configs);
  CVec h = CVec::Zero(ch.num_rx());
  for (int i = 0; i < ch.num_ris(); ++i) h += rx_effective(ch, theta, i) * ch.g_ul[i][k];
  return h;
}

EffectiveSi effective_si(const ChannelSet& ch, std::span<const AmRisConfig> configs) {
  const auto theta = ris_diagonals(configs);
  const int n_ris = ch.num_ris();
  EffectiveSi out;
  out.f_bar = ch.s_si;
  out.f_r.reserve(n_ris);
  out.f_dl.assign(n_ris, {});
  for (int i = 0; i < n_ris; ++i) {
    out.f_r.push_back(rx_effective(ch, theta, i));
    out.f_bar += out.f_r.back() * ch.d_t[i];
    for (int k = 0; k < ch.num_dl(); ++k) out.f_dl[i].push_back(user_effective(ch, theta, ch.g_dl, i, k));
  }
  out.f_uu = ch.h_uu;
  for (int k = 0; k < ch.num_dl(); ++k)
    for (int kp = 0; kp < ch.num_ul(); ++kp)
      for (int i = 0; i < n_ris; ++i) out.f_uu(k, kp) += (out.f_dl[i][k] * ch.g_ul[i][kp])(0, 0);
  return out;
}

}  // namespace amris
