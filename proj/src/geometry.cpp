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

#include "amris/geometry.hpp"

#include <algorithm>

namespace amris {

namespace {

// Grid positions are multiples of the resolution, so comparisons against
// spacing thresholds need a little slack for rounding.
constexpr double kSlack = 1e-9;

double snap(double v, double res) { return std::round(v / res) * res; }

bool in_panel(const Vec3& p, double x_lo, double x_hi, double y_hi) {
  return p.x >= x_lo - kSlack && p.x <= x_hi + kSlack && p.y >= -kSlack &&
         p.y <= y_hi + kSlack;
}

Vec3 step_for(int code, double res) {
  switch (static_cast<FaMove>(code)) {
    case FaMove::kPlusX: return {res, 0.0, 0.0};
    case FaMove::kMinusX: return {-res, 0.0, 0.0};
    case FaMove::kPlusY: return {0.0, res, 0.0};
    case FaMove::kMinusY: return {0.0, -res, 0.0};
    default: return {};
  }
}

}  // namespace

Vec3 aav_move_velocity(AavMove move, double v_max) {
  switch (move) {
    case AavMove::kPlusX: return {v_max, 0.0, 0.0};
    case AavMove::kMinusX: return {-v_max, 0.0, 0.0};
    case AavMove::kPlusY: return {0.0, v_max, 0.0};
    case AavMove::kMinusY: return {0.0, -v_max, 0.0};
    case AavMove::kPlusZ: return {0.0, 0.0, v_max};
    case AavMove::kMinusZ: return {0.0, 0.0, -v_max};
    case AavMove::kHover: return {};
  }
  return {};
}

AavState propagate_aav(const AavState& state, const Vec3& commanded_velocity, double tau,
                       const AavLimits& limits) {
  Vec3 v = commanded_velocity;
  const double speed = v.norm();
  if (speed > limits.v_max) v = v * (limits.v_max / speed);

  const Vec3 dv = v - state.velocity;
  const double dv_norm = dv.norm();
  const double dv_max = limits.a_max * tau;
  if (dv_norm > dv_max) v = state.velocity + dv * (dv_max / dv_norm);

  Vec3 p = state.position + v * tau;
  p.x = std::min(std::max(p.x, limits.box_min.x), limits.box_max.x);
  p.y = std::min(std::max(p.y, limits.box_min.y), limits.box_max.y);
  p.z = std::min(std::max(p.z, limits.box_min.z), limits.box_max.z);

  return AavState{p, v, v};
}

double pairwise_separation_violation(std::span<const Vec3> positions, double d_min) {
  double total = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      total += std::max(0.0, d_min - distance(positions[i], positions[j]));
  return total;
}

AngleSet angles_between(const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  const double horizontal = std::hypot(d.x, d.y);
  if (horizontal == 0.0 && d.z == 0.0) throw GeometryError("degenerate geometry");
  double az = std::atan2(d.y, d.x);
  if (az < 0.0) az += 2.0 * kPi;
  if (az >= 2.0 * kPi) az = 0.0;
  return AngleSet{az, std::atan2(d.z, horizontal)};
}

FaLayout make_fa_layout(int n_tx, int n_rx, double length_x, double length_y,
                        double resolution, double height) {
  FaLayout layout;
  layout.length_x = length_x;
  layout.length_y = length_y;
  layout.resolution = resolution;
  layout.height = height;

  auto fill = [&](int n, double x_offset, std::vector<Vec3>& out) {
    if (n <= 0) return;
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    const int rows = (n + cols - 1) / cols;
    const double dx = length_x / cols;
    const double dy = length_y / rows;
    for (int e = 0; e < n; ++e) {
      const int c = e % cols;
      const int r = e / cols;
      out.push_back({x_offset + snap((c + 0.5) * dx, resolution), snap((r + 0.5) * dy, resolution),
                     height});
    }
  };
  fill(n_tx, 0.0, layout.tx_positions);
  fill(n_rx, length_x, layout.rx_positions);
  return layout;
}

FaLayout fa_apply_moves(const FaLayout& layout, std::span<const int> moves,
                        const FaSpacing& spacing) {
  FaLayout out = layout;
  const std::size_t n_tx = out.tx_positions.size();
  const std::size_t n_total = n_tx + out.rx_positions.size();
  for (std::size_t e = 0; e < n_total && e < moves.size(); ++e) {
    const Vec3 step = step_for(moves[e], out.resolution);
    if (step == Vec3{}) continue;

    const bool is_tx = e < n_tx;
    std::vector<Vec3>& own = is_tx ? out.tx_positions : out.rx_positions;
    const std::vector<Vec3>& other = is_tx ? out.rx_positions : out.tx_positions;
    const std::size_t idx = is_tx ? e : e - n_tx;

    Vec3 cand = own[idx] + step;
    cand.x = snap(cand.x, out.resolution);
    cand.y = snap(cand.y, out.resolution);

    const double x_lo = is_tx ? 0.0 : out.length_x;
    const double x_hi = is_tx ? out.length_x : 2.0 * out.length_x;
    bool ok = in_panel(cand, x_lo, x_hi, out.length_y);
    for (std::size_t j = 0; ok && j < own.size(); ++j)
      if (j != idx && distance(cand, own[j]) < spacing.intra - kSlack) ok = false;
    for (std::size_t j = 0; ok && j < other.size(); ++j)
      if (distance(cand, other[j]) < spacing.inter - kSlack) ok = false;
    if (ok) own[idx] = cand;
  }
  return out;
}

FaLayout fa_apply_moves_unchecked(const FaLayout& layout, std::span<const int> moves) {
  FaLayout out = layout;
  const std::size_t n_tx = out.tx_positions.size();
  const std::size_t n_total = n_tx + out.rx_positions.size();
  for (std::size_t e = 0; e < n_total && e < moves.size(); ++e) {
    Vec3& p = e < n_tx ? out.tx_positions[e] : out.rx_positions[e - n_tx];
    p += step_for(moves[e], out.resolution);
  }
  return out;
}

std::pair<double, double> fa_spacing_deficits(const FaLayout& layout, const FaSpacing& spacing) {
  double intra = pairwise_separation_violation(layout.tx_positions, spacing.intra) +
                 pairwise_separation_violation(layout.rx_positions, spacing.intra);
  double inter = 0.0;
  for (const Vec3& t : layout.tx_positions)
    for (const Vec3& r : layout.rx_positions)
      inter += std::max(0.0, spacing.inter - distance(t, r));
  return {intra, inter};
}

bool fa_layout_feasible(const FaLayout& layout, const FaSpacing& spacing) {
  auto on_grid = [&](double v) {
    return std::abs(v - snap(v, layout.resolution)) < 1e-9;
  };
  for (const Vec3& p : layout.tx_positions)
    if (!in_panel(p, 0.0, layout.length_x, layout.length_y) || p.z != layout.height ||
        !on_grid(p.x) || !on_grid(p.y))
      return false;
  for (const Vec3& p : layout.rx_positions)
    if (!in_panel(p, layout.length_x, 2.0 * layout.length_x, layout.length_y) ||
        p.z != layout.height || !on_grid(p.x) || !on_grid(p.y))
      return false;
  auto [intra, inter] = fa_spacing_deficits(
      layout, FaSpacing{spacing.intra - kSlack, spacing.inter - kSlack});
  return intra == 0.0 && inter == 0.0;
}

}  // namespace amris
