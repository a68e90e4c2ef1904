// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "trackpred/types.hpp"

namespace trackpred {

/// Disc agent in the ground plane.
struct AgentDisc {
  int id = 0;
  WorldPoint position;
  Vec2 velocity;
  double radius = 0.5;
  double pref_speed = 1.0;
  double max_speed = 1.5;
  WorldPoint goal;
};

/// Velocity-space constraint. Permitted velocities v satisfy
/// det(direction, v - point) >= 0, i.e. the closed half-plane to the left of
/// the directed boundary line through `point`.
struct OrcaHalfPlane {
  Vec2 point;
  Vec2 direction;

  bool permits(Vec2 v, double tol = 0.0) const { return det(direction, v - point) >= -tol; }
};

struct VelocitySolution {
  Vec2 velocity;
  bool feasible = true;
};

struct OrcaParams {
  double time_horizon = 2.0;     // seconds; truncates the velocity-obstacle cone
  double neighbor_radius = 15.0;  // meters; constraints are built only for agents this close
};

/// Unit vector toward the goal scaled by pref_speed; zero within 0.1 m of it.
Vec2 preferred_velocity(const AgentDisc& a);

/// Reciprocal avoidance constraint imposed on `a` by `b`: the boundary runs
/// through v_a + u/2 where u is the smallest relative-velocity correction
/// that exits the velocity-obstacle cone truncated at time_horizon (at dt
/// when the discs already overlap, so one step resolves the overlap).
OrcaHalfPlane orca_halfplane(const AgentDisc& a, const AgentDisc& b, double time_horizon, double dt);

/// Closest point to v_pref inside the intersection of the half-planes and the
/// speed disc, via incremental linear programming in the given plane order.
/// When the intersection is empty, falls back to the velocity minimizing the
/// maximum constraint violation (still inside the speed disc) and reports
/// feasible = false.
VelocitySolution solve_velocity(std::span<const OrcaHalfPlane> planes, Vec2 v_pref, double max_speed);

/// Advances all agents one synchronous step from a snapshot of the input
/// state: every new velocity is computed against the old positions and
/// velocities, then positions integrate by dt. Throws DuplicateId on
/// duplicate agent ids.
std::vector<AgentDisc> step_simulation(std::span<const AgentDisc> agents, double dt, const OrcaParams& params = {});

/// Same step with externally fixed preferred velocities (one per agent).
std::vector<AgentDisc> step_simulation(std::span<const AgentDisc> agents, std::span<const Vec2> preferred, double dt,
                                       const OrcaParams& params = {});

/// One-step motion prior for a tracked agent: ego keeps its current velocity
/// as the preferred one and yields to the given neighbors. Returns the
/// predicted position and velocity after dt.
std::pair<WorldPoint, Vec2> predict_next_state(const AgentDisc& ego, std::span<const AgentDisc> neighbors, double dt,
                                               const OrcaParams& params = {});

}  // namespace trackpred
