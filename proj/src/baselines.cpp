// SPDX-License-Identifier: Apache-2.0
#include "trackpred/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "trackpred/errors.hpp"

namespace trackpred {

std::vector<WorldPoint> predict_constant_velocity(std::span<const WorldPoint> history, int steps, double fps) {
  if (history.size() < 2) throw TooShort("constant-velocity extrapolation needs at least two points");
  if (fps <= 0.0) throw ConfigError("fps must be positive");
  if (steps < 0) throw ConfigError("horizon steps must be non-negative");
  const WorldPoint last = history[history.size() - 1];
  const Vec2 v = (last - history[history.size() - 2]) * fps;
  std::vector<WorldPoint> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 1; i <= steps; ++i) out.push_back(last + v * (static_cast<double>(i) / fps));
  return out;
}

std::vector<WorldPoint> predict_constant_velocity(const Sample& sample, double fps) {
  const std::vector<WorldPoint> history = history_world(sample);
  return predict_constant_velocity(history, static_cast<int>(sample.future.size()), fps);
}

std::vector<WorldPoint> predict_rvo_rollout(const Sample& sample, const AnchorScene& scene, double fps,
                                            const OrcaParams& params) {
  if (fps <= 0.0) throw ConfigError("fps must be positive");
  const int steps = static_cast<int>(sample.future.size());
  const double dt = 1.0 / fps;

  std::vector<AgentDisc> agents;
  std::vector<Vec2> preferred;
  agents.reserve(scene.neighbors.size() + 1);
  const auto add = [&](const NeighborState& s) {
    AgentDisc a;
    a.id = s.id;
    a.position = s.position;
    a.velocity = s.velocity;
    a.radius = s.radius;
    a.pref_speed = norm(s.velocity);
    a.max_speed = std::max(1.5 * a.pref_speed, 0.1);
    a.goal = s.position + s.velocity * 1e6;  // unused: preferences are frozen
    agents.push_back(a);
    preferred.push_back(s.velocity);
  };
  add(scene.ego);
  for (const NeighborState& n : scene.neighbors) add(n);

  std::vector<WorldPoint> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    agents = step_simulation(agents, preferred, dt, params);
    out.push_back(agents[0].position);
  }
  return out;
}

}  // namespace trackpred
