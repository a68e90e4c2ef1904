// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "trackpred/types.hpp"

namespace trackpred {

/// Per-frame kinematic state for one agent: positions, backward-difference
/// velocities, local crowd concentration and the physical footprint.
struct StateSpace {
  Trajectory history;
  std::vector<Vec2> velocities;
  std::vector<int> concentration;
  AgentSize size;
};

/// Backward finite differences scaled by the frame rate: v_i = (p_i - p_{i-1}) * fps / gap.
/// The first entry duplicates the second so sizes match. Requires >= 2 points
/// (TooShort), strictly increasing frames (FrameOutOfOrder) and a uniform
/// frame gap (LengthMismatch).
std::vector<Vec2> derivative(const Trajectory& t, double fps);

/// Number of points inside the half-open box [query, query + delta). The
/// query corner itself is inside, so a query at an agent's own position
/// counts that agent. Throws InvalidDelta unless both deltas are positive.
int concentration(std::span<const WorldPoint> positions, WorldPoint query, Vec2 delta);

/// Splits a trajectory at frame gaps larger than max_gap and fills smaller
/// gaps by linear interpolation, yielding segments with consecutive frames.
std::vector<Trajectory> repair_gaps(const Trajectory& t, int max_gap = 5);

/// Assembles the per-frame state of `ego` against every agent present in the
/// same frames (ego counts itself even when absent from `all`).
StateSpace build_state_space(const Trajectory& ego, std::span<const Trajectory> all, Vec2 delta, AgentSize size,
                             double fps);

}  // namespace trackpred
