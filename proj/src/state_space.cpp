// SPDX-License-Identifier: Apache-2.0
#include "trackpred/state_space.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "trackpred/errors.hpp"

namespace trackpred {

std::vector<Vec2> derivative(const Trajectory& t, double fps) {
  const auto& p = t.points;
  if (p.size() < 2) throw TooShort("derivative needs at least 2 trajectory points");
  if (fps <= 0.0) throw ConfigError("fps must be positive");
  const int gap = p[1].frame_id - p[0].frame_id;
  if (gap <= 0) throw FrameOutOfOrder("trajectory frames must be strictly increasing");
  for (std::size_t i = 1; i < p.size(); ++i) {
    const int g = p[i].frame_id - p[i - 1].frame_id;
    if (g <= 0) throw FrameOutOfOrder("trajectory frames must be strictly increasing");
    if (g != gap) throw LengthMismatch("trajectory frame gaps are not uniform");
  }
  const double scale = fps / static_cast<double>(gap);
  std::vector<Vec2> v(p.size());
  for (std::size_t i = 1; i < p.size(); ++i) v[i] = (p[i].position - p[i - 1].position) * scale;
  v[0] = v[1];
  return v;
}

int concentration(std::span<const WorldPoint> positions, WorldPoint query, Vec2 delta) {
  if (!(delta.x > 0.0) || !(delta.y > 0.0)) throw InvalidDelta("concentration box deltas must be positive");
  int count = 0;
  for (const WorldPoint& p : positions) {
    if (p.x >= query.x && p.x < query.x + delta.x && p.y >= query.y && p.y < query.y + delta.y) ++count;
  }
  return count;
}

std::vector<Trajectory> repair_gaps(const Trajectory& t, int max_gap) {
  std::vector<Trajectory> segments;
  if (t.points.empty()) return segments;
  Trajectory cur{t.agent_id, t.cls, {t.points.front()}};
  for (std::size_t i = 1; i < t.points.size(); ++i) {
    const auto& prev = t.points[i - 1];
    const auto& next = t.points[i];
    const int gap = next.frame_id - prev.frame_id;
    if (gap <= 0) throw FrameOutOfOrder("trajectory frames must be strictly increasing");
    if (gap > max_gap + 1) {
      segments.push_back(std::move(cur));
      cur = Trajectory{t.agent_id, t.cls, {next}};
      continue;
    }
    for (int f = 1; f < gap; ++f) {
      const double a = static_cast<double>(f) / static_cast<double>(gap);
      cur.points.push_back(
          {prev.frame_id + f, {prev.position.x + a * (next.position.x - prev.position.x),
                               prev.position.y + a * (next.position.y - prev.position.y)}});
    }
    cur.points.push_back(next);
  }
  segments.push_back(std::move(cur));
  return segments;
}

StateSpace build_state_space(const Trajectory& ego, std::span<const Trajectory> all, Vec2 delta, AgentSize size,
                             double fps) {
  StateSpace s;
  s.history = ego;
  s.velocities = derivative(ego, fps);
  s.size = size;

  std::unordered_map<int, std::vector<WorldPoint>> by_frame;
  std::unordered_set<int> seen_ids;
  for (const Trajectory& t : all) {
    if (!seen_ids.insert(t.agent_id).second) throw DuplicateId("duplicate agent id in state-space context");
    for (const auto& p : t.points) by_frame[p.frame_id].push_back(p.position);
  }
  const bool ego_listed = seen_ids.contains(ego.agent_id);

  s.concentration.reserve(ego.points.size());
  for (const auto& p : ego.points) {
    auto& frame_positions = by_frame[p.frame_id];
    if (!ego_listed) frame_positions.push_back(p.position);
    s.concentration.push_back(concentration(frame_positions, p.position, delta));
  }
  return s;
}

}  // namespace trackpred
