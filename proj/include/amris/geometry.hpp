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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace amris {

// Raised for impossible geometric inputs such as coincident endpoints or
// zero-length links.
class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Vec3 operator*(const Vec3& a, double s) {
    return {a.x * s, a.y * s, a.z * s};
  }
  friend Vec3 operator*(double s, const Vec3& a) { return a * s; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Kinematic state of one aerial vehicle carrying a metasurface.
struct AavState {
  Vec3 position;
  Vec3 velocity;
  Vec3 prev_velocity;
};

struct AavLimits {
  double v_max = 15.0;  // m/s
  double a_max = 1.0;   // m/s^2
  Vec3 box_min{0.0, 0.0, 50.0};
  Vec3 box_max{500.0, 500.0, 500.0};
};

// Discrete flight commands. Each non-hover code commands v_max along one axis.
enum class AavMove : int { kPlusX = 0, kMinusX, kPlusY, kMinusY, kPlusZ, kMinusZ, kHover };
inline constexpr int kNumAavMoves = 7;

Vec3 aav_move_velocity(AavMove move, double v_max);

// Speed clip, then acceleration clip, then position update and box clamp.
AavState propagate_aav(const AavState& state, const Vec3& commanded_velocity, double tau,
                       const AavLimits& limits);

// Sum over unordered pairs of max(0, d_min - distance).
double pairwise_separation_violation(std::span<const Vec3> positions, double d_min);

// Azimuth in [0, 2pi) and elevation above the horizontal plane, both radians.
struct AngleSet {
  double azimuth = 0.0;
  double elevation = 0.0;
};

AngleSet angles_between(const Vec3& from, const Vec3& to);

inline constexpr double kPi = 3.14159265358979323846;
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

// Fluid-antenna element positions on the two BS panels. Tx elements live in
// x in [0, Lx], Rx elements in x in [Lx, 2Lx], both in y in [0, Ly] at the BS
// height. Coordinates are panel-local; z carries the BS height.
struct FaLayout {
  std::vector<Vec3> tx_positions;
  std::vector<Vec3> rx_positions;
  double length_x = 1.0;
  double length_y = 1.0;
  double resolution = 0.02;
  double height = 0.0;
};

struct FaSpacing {
  double intra = 0.05;  // d_th,1
  double inter = 0.1;   // d_th,2
};

enum class FaMove : int { kPlusX = 0, kMinusX, kPlusY, kMinusY, kStay };
inline constexpr int kNumFaMoves = 5;

// Evenly spread grid of n elements per panel, snapped to the resolution.
FaLayout make_fa_layout(int n_tx, int n_rx, double length_x, double length_y,
                        double resolution, double height);

// One move per element, Tx elements first then Rx. Moves are applied in that
// order; one that leaves its panel or breaks a spacing rule against the
// current positions of the other elements becomes a stay.
FaLayout fa_apply_moves(const FaLayout& layout, std::span<const int> moves,
                        const FaSpacing& spacing);

// Same moves applied without any feasibility check. Used for penalty
// bookkeeping of what the agent asked for.
FaLayout fa_apply_moves_unchecked(const FaLayout& layout, std::span<const int> moves);

// Raw (intra, inter) spacing deficits with each pair clipped at zero.
std::pair<double, double> fa_spacing_deficits(const FaLayout& layout, const FaSpacing& spacing);

// True when every FaLayout invariant holds (box, height, spacing, grid).
bool fa_layout_feasible(const FaLayout& layout, const FaSpacing& spacing);

}  // namespace amris
