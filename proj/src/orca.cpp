// SPDX-License-Identifier: Apache-2.0
#include "trackpred/orca.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "trackpred/errors.hpp"

namespace trackpred {

namespace {

constexpr double kArrivalRadius = 0.1;
// Head-on deadlocks (correction exactly opposing v_pref) are broken by
// rotating v_pref counterclockwise by this angle before solving.
constexpr double kDeadlockNudge = 1e-3;

// Solves on the boundary line of plane `line_no`, restricted to the speed
// disc and the previously satisfied planes. direction_opt selects
// maximization along opt_v (unit) instead of closest-point projection.
bool linear_program1(std::span<const OrcaHalfPlane> planes, std::size_t line_no, double max_speed, Vec2 opt_v,
                     bool direction_opt, Vec2& result) {
  const OrcaHalfPlane& line = planes[line_no];
  const double dot_pd = dot(line.point, line.direction);
  const double disc = dot_pd * dot_pd + max_speed * max_speed - norm_sq(line.point);
  if (disc < 0.0) return false;  // boundary line misses the speed disc

  const double sqrt_disc = std::sqrt(disc);
  double t_left = -dot_pd - sqrt_disc;
  double t_right = -dot_pd + sqrt_disc;

  for (std::size_t i = 0; i < line_no; ++i) {
    const double denom = det(line.direction, planes[i].direction);
    const double numer = det(planes[i].direction, line.point - planes[i].point);
    if (std::abs(denom) <= 1e-12) {
      // Parallel boundaries: either plane i fully contains this line or cuts it off.
      if (numer < 0.0) return false;
      continue;
    }
    const double t = numer / denom;
    if (denom >= 0.0) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) return false;
  }

  double t;
  if (direction_opt) {
    t = dot(opt_v, line.direction) > 0.0 ? t_right : t_left;
  } else {
    t = std::clamp(dot(line.direction, opt_v - line.point), t_left, t_right);
  }
  result = line.point + t * line.direction;
  return true;
}

// Incremental LP over the planes in input order. Returns planes.size() on
// success, otherwise the index of the first plane that could not be satisfied
// (result then holds the optimum of the prefix).
std::size_t linear_program2(std::span<const OrcaHalfPlane> planes, double max_speed, Vec2 opt_v, bool direction_opt,
                            Vec2& result) {
  if (direction_opt) {
    result = opt_v * max_speed;  // opt_v is a unit direction
  } else if (norm_sq(opt_v) > max_speed * max_speed) {
    result = normalized(opt_v) * max_speed;
  } else {
    result = opt_v;
  }

  for (std::size_t i = 0; i < planes.size(); ++i) {
    if (det(planes[i].direction, planes[i].point - result) > 0.0) {
      const Vec2 saved = result;
      if (!linear_program1(planes, i, max_speed, opt_v, direction_opt, result)) {
        result = saved;
        return i;
      }
    }
  }
  return planes.size();
}

// Minimizes the maximum violation across the planes that could not be
// satisfied, keeping the result inside the speed disc.
void linear_program3(std::span<const OrcaHalfPlane> planes, std::size_t begin_line, double max_speed, Vec2& result) {
  double distance = 0.0;
  for (std::size_t i = begin_line; i < planes.size(); ++i) {
    if (det(planes[i].direction, planes[i].point - result) <= distance) continue;

    std::vector<OrcaHalfPlane> proj;
    proj.reserve(i);
    for (std::size_t j = 0; j < i; ++j) {
      OrcaHalfPlane line;
      const double determinant = det(planes[i].direction, planes[j].direction);
      if (std::abs(determinant) <= 1e-12) {
        if (dot(planes[i].direction, planes[j].direction) > 0.0) continue;  // same direction: redundant
        line.point = 0.5 * (planes[i].point + planes[j].point);
      } else {
        line.point = planes[i].point +
                     (det(planes[j].direction, planes[i].point - planes[j].point) / determinant) * planes[i].direction;
      }
      line.direction = normalized(planes[j].direction - planes[i].direction);
      proj.push_back(line);
    }

    const Vec2 saved = result;
    if (linear_program2(proj, max_speed, perp(planes[i].direction), true, result) < proj.size()) {
      // Rounding may make the projected program fail; keep the previous point.
      result = saved;
    }
    distance = det(planes[i].direction, planes[i].point - result);
  }
}

Vec2 velocity_against(const AgentDisc& ego, Vec2 v_pref, std::span<const OrcaHalfPlane> planes, double max_speed) {
  // Deterministic deadlock tie-break: if some constraint pushes exactly
  // against the preferred direction, nudge v_pref counterclockwise.
  const double pref_norm = norm(v_pref);
  if (pref_norm > 0.0) {
    for (const OrcaHalfPlane& plane : planes) {
      const Vec2 u = 2.0 * (plane.point - ego.velocity);
      const double u_norm = norm(u);
      if (u_norm <= 0.0) continue;
      if (std::abs(det(u, v_pref)) <= 1e-9 * u_norm * pref_norm && dot(u, v_pref) < 0.0) {
        v_pref = rotated(v_pref, kDeadlockNudge);
        break;
      }
    }
  }
  return solve_velocity(planes, v_pref, max_speed).velocity;
}

std::vector<OrcaHalfPlane> planes_against(const AgentDisc& ego, std::span<const AgentDisc> others, double dt,
                                          const OrcaParams& params) {
  std::vector<OrcaHalfPlane> planes;
  planes.reserve(others.size());
  for (const AgentDisc& other : others) {
    if (other.id == ego.id) continue;
    if (distance(other.position, ego.position) > params.neighbor_radius) continue;
    planes.push_back(orca_halfplane(ego, other, params.time_horizon, dt));
  }
  return planes;
}

void check_unique_ids(std::span<const AgentDisc> agents) {
  std::unordered_set<int> ids;
  for (const AgentDisc& a : agents) {
    if (!ids.insert(a.id).second) throw DuplicateId("duplicate agent id in simulation");
  }
}

std::vector<AgentDisc> step_impl(std::span<const AgentDisc> agents, std::span<const Vec2> preferred, double dt,
                                 const OrcaParams& params) {
  check_unique_ids(agents);
  if (dt <= 0.0) throw ConfigError("simulation step dt must be positive");

  std::vector<AgentDisc> next(agents.begin(), agents.end());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentDisc& ego = agents[i];
    const auto planes = planes_against(ego, agents, dt, params);
    next[i].velocity = velocity_against(ego, preferred[i], planes, ego.max_speed);
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    next[i].position = agents[i].position + next[i].velocity * dt;
  }
  return next;
}

}  // namespace

Vec2 preferred_velocity(const AgentDisc& a) {
  const Vec2 to_goal = a.goal - a.position;
  if (norm(to_goal) < kArrivalRadius) return {0.0, 0.0};
  return normalized(to_goal) * a.pref_speed;
}

OrcaHalfPlane orca_halfplane(const AgentDisc& a, const AgentDisc& b, double time_horizon, double dt) {
  if (time_horizon <= 0.0 || dt <= 0.0) throw ConfigError("time horizon and dt must be positive");
  const Vec2 rel_pos = b.position - a.position;
  const Vec2 rel_vel = a.velocity - b.velocity;
  const double dist_sq = norm_sq(rel_pos);
  const double r = a.radius + b.radius;
  const double r_sq = r * r;

  Vec2 u;
  Vec2 direction;

  if (dist_sq > r_sq) {
    // No current overlap: project rel_vel out of the cone truncated at time_horizon.
    const double inv_h = 1.0 / time_horizon;
    const Vec2 w = rel_vel - inv_h * rel_pos;
    const double w_len_sq = norm_sq(w);
    const double dot1 = dot(w, rel_pos);
    if (dot1 < 0.0 && dot1 * dot1 > r_sq * w_len_sq) {
      // Closest exit is the truncation cap.
      const double w_len = std::sqrt(w_len_sq);
      const Vec2 unit_w = w / w_len;
      direction = {unit_w.y, -unit_w.x};
      u = (r * inv_h - w_len) * unit_w;
    } else {
      // Closest exit is one of the cone legs.
      const double leg = std::sqrt(dist_sq - r_sq);
      if (det(rel_pos, w) > 0.0) {
        direction = Vec2{rel_pos.x * leg - rel_pos.y * r, rel_pos.x * r + rel_pos.y * leg} / dist_sq;
      } else {
        direction = Vec2{rel_pos.x * leg + rel_pos.y * r, -rel_pos.x * r + rel_pos.y * leg} / (-dist_sq);
      }
      const double dot2 = dot(rel_vel, direction);
      u = dot2 * direction - rel_vel;
    }
  } else {
    // Already overlapping: push apart within a single step.
    const double inv_dt = 1.0 / dt;
    const Vec2 w = rel_vel - inv_dt * rel_pos;
    const double w_len = norm(w);
    if (w_len <= 0.0) {
      // Coincident centers with equal velocities: pick a fixed separation axis.
      direction = {0.0, -1.0};
      u = {r * inv_dt, 0.0};
    } else {
      const Vec2 unit_w = w / w_len;
      direction = {unit_w.y, -unit_w.x};
      u = (r * inv_dt - w_len) * unit_w;
    }
  }

  return {a.velocity + 0.5 * u, direction};
}

VelocitySolution solve_velocity(std::span<const OrcaHalfPlane> planes, Vec2 v_pref, double max_speed) {
  if (max_speed <= 0.0) throw ConfigError("max_speed must be positive");
  VelocitySolution solution;
  const std::size_t failed_at = linear_program2(planes, max_speed, v_pref, false, solution.velocity);
  if (failed_at < planes.size()) {
    solution.feasible = false;
    linear_program3(planes, failed_at, max_speed, solution.velocity);
  }
  return solution;
}

std::vector<AgentDisc> step_simulation(std::span<const AgentDisc> agents, double dt, const OrcaParams& params) {
  std::vector<Vec2> preferred(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) preferred[i] = preferred_velocity(agents[i]);
  return step_impl(agents, preferred, dt, params);
}

std::vector<AgentDisc> step_simulation(std::span<const AgentDisc> agents, std::span<const Vec2> preferred, double dt,
                                       const OrcaParams& params) {
  if (preferred.size() != agents.size()) throw LengthMismatch("one preferred velocity per agent required");
  return step_impl(agents, preferred, dt, params);
}

std::pair<WorldPoint, Vec2> predict_next_state(const AgentDisc& ego, std::span<const AgentDisc> neighbors, double dt,
                                               const OrcaParams& params) {
  if (dt <= 0.0) throw ConfigError("dt must be positive");
  const auto planes = planes_against(ego, neighbors, dt, params);
  const Vec2 v = velocity_against(ego, ego.velocity, planes, ego.max_speed);
  return {ego.position + v * dt, v};
}

}  // namespace trackpred
