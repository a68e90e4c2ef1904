// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace trackpred {

/// Plain 2-vector used for velocities, displacements and velocity-space math.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
};

constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
/// 2D cross product (z component); positive when b lies counterclockwise of a.
constexpr double det(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm_sq(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 normalized(Vec2 v) {
  const double n = norm(v);
  return n > 0.0 ? v / n : Vec2{0.0, 0.0};
}
/// Counterclockwise perpendicular.
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }
inline Vec2 rotated(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}
/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Ground-plane position in meters.
struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
};

constexpr Vec2 operator-(WorldPoint a, WorldPoint b) { return {a.x - b.x, a.y - b.y}; }
constexpr WorldPoint operator+(WorldPoint p, Vec2 v) { return {p.x + v.x, p.y + v.y}; }
constexpr WorldPoint operator-(WorldPoint p, Vec2 v) { return {p.x - v.x, p.y - v.y}; }
inline double distance(WorldPoint a, WorldPoint b) { return norm(a - b); }

/// Image-plane position in pixels.
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};

enum class AgentClass : std::uint8_t {
  Car = 0,
  Bus,
  Truck,
  Rickshaw,
  Pedestrian,
  Scooter,
  Motorcycle,
  Bicycle,
  Other,
};

inline constexpr int kNumAgentClasses = 9;

std::string_view to_string(AgentClass c);
/// Parses the lowercase class name; throws ParseError-free Error on unknown names.
AgentClass parse_agent_class(std::string_view name);

/// Physical footprint, meters.
struct AgentSize {
  double length = 0.0;
  double width = 0.0;
};

/// Radius of the disc circumscribing a length x width footprint.
inline double disc_radius(AgentSize s) { return 0.5 * std::hypot(s.length, s.width); }

/// Per-class physical defaults used by the simulator and the tracker motion prior.
struct ClassDefaults {
  std::array<AgentSize, kNumAgentClasses> size{};
  std::array<double, kNumAgentClasses> pref_speed{};
  std::array<double, kNumAgentClasses> max_speed{};

  static ClassDefaults standard();

  AgentSize size_of(AgentClass c) const { return size[static_cast<int>(c)]; }
  double pref_speed_of(AgentClass c) const { return pref_speed[static_cast<int>(c)]; }
  double max_speed_of(AgentClass c) const { return max_speed[static_cast<int>(c)]; }
};

struct TrajectoryPoint {
  int frame_id = 0;
  WorldPoint position;
};

/// One agent's world-frame track, ordered by frame id.
struct Trajectory {
  int agent_id = 0;
  AgentClass cls = AgentClass::Other;
  std::vector<TrajectoryPoint> points;
};

}  // namespace trackpred
