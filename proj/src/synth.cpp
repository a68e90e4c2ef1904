// SPDX-License-Identifier: Apache-2.0
#include "trackpred/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "trackpred/errors.hpp"

namespace trackpred {
namespace {

struct Route {
  WorldPoint start;
  WorldPoint goal;
};

/// Lane-structured draw: one of four flows (both directions of both axes),
/// entering near one edge and aiming for the far side with some lateral
/// drift so routes cross.
Route draw_route(std::mt19937_64& rng, double width, double height) {
  std::uniform_int_distribution<int> flow_dist(0, 3);
  std::uniform_real_distribution<double> margin(0.02, 0.12);
  std::uniform_real_distribution<double> lane(0.15, 0.85);
  std::uniform_real_distribution<double> drift(-0.15, 0.15);

  const int flow = flow_dist(rng);
  const bool x_axis = flow < 2;
  const bool forward = (flow % 2) == 0;
  const double along_extent = x_axis ? width : height;
  const double cross_extent = x_axis ? height : width;

  double s_along = margin(rng) * along_extent;
  double g_along = along_extent - margin(rng) * along_extent;
  if (!forward) {
    s_along = along_extent - s_along;
    g_along = along_extent - g_along;
  }
  const double s_cross = lane(rng) * cross_extent;
  const double g_cross =
      std::clamp(s_cross + drift(rng) * cross_extent, 0.05 * cross_extent, 0.95 * cross_extent);

  if (x_axis) return {{s_along, s_cross}, {g_along, g_cross}};
  return {{s_cross, s_along}, {g_cross, g_along}};
}

AgentClass draw_class(std::mt19937_64& rng, const std::map<AgentClass, double>& mix) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  for (const auto& [cls, p] : mix) {
    acc += p;
    if (u < acc) return cls;
  }
  return mix.rbegin()->first;  // u landed in the rounding sliver at 1.0
}

}  // namespace

void ScenarioSpec::validate() const {
  if (n_agents < 1) throw ConfigError("scenario.n_agents must be at least 1");
  if (arena_width <= 0.0 || arena_height <= 0.0) throw ConfigError("scenario arena extents must be positive");
  if (duration <= 0.0) throw ConfigError("scenario.duration must be positive");
  if (fps <= 0.0) throw ConfigError("scenario.fps must be positive");
  if (class_mix.empty()) throw ConfigError("scenario.class_mix must not be empty");
  double sum = 0.0;
  for (const auto& [cls, p] : class_mix) {
    if (p < 0.0) throw ConfigError("scenario.class_mix probabilities must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("scenario.class_mix probabilities must sum to 1");
}

double scenario_density_per_km(const ScenarioSpec& spec) {
  const double axis_m = std::max(spec.arena_width, spec.arena_height);
  return static_cast<double>(spec.n_agents) / (axis_m / 1000.0);
}

Scenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  std::vector<AgentDisc> agents;
  Scenario scenario;
  agents.reserve(static_cast<std::size_t>(spec.n_agents));
  for (int i = 0; i < spec.n_agents; ++i) {
    const AgentClass cls = draw_class(rng, spec.class_mix);
    AgentDisc agent;
    agent.id = i + 1;
    agent.radius = disc_radius(spec.classes.size_of(cls));
    agent.pref_speed = spec.classes.pref_speed_of(cls);
    agent.max_speed = spec.classes.max_speed_of(cls);

    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const Route route = draw_route(rng, spec.arena_width, spec.arena_height);
      placed = true;
      for (const AgentDisc& other : agents) {
        if (norm(route.start - other.position) <= agent.radius + other.radius + 0.5) {
          placed = false;
          break;
        }
      }
      if (placed) {
        agent.position = route.start;
        agent.goal = route.goal;
      }
    }
    if (!placed) throw InfeasiblePlacement("no non-overlapping start found for agent " + std::to_string(agent.id));
    agent.velocity = preferred_velocity(agent);
    agents.push_back(agent);

    Trajectory t;
    t.agent_id = agent.id;
    t.cls = cls;
    scenario.trajectories.push_back(std::move(t));
    scenario.classes.emplace(agent.id, cls);
  }

  const int steps = static_cast<int>(std::lround(spec.duration * spec.fps));
  for (std::size_t i = 0; i < agents.size(); ++i)
    scenario.trajectories[i].points.push_back({0, agents[i].position});
  const double dt = 1.0 / spec.fps;
  std::vector<double> cruise(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) cruise[i] = agents[i].pref_speed;
  for (int step = 1; step <= steps; ++step) {
    // Decelerate on final approach so a fast agent lands on its goal instead
    // of overstepping the arrival radius every frame.
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const double dist = norm(agents[i].goal - agents[i].position);
      agents[i].pref_speed = std::min(cruise[i], dist / dt);
    }
    std::vector<AgentDisc> next = step_simulation(agents, dt, spec.orca);
    agents.swap(next);
    for (std::size_t i = 0; i < agents.size(); ++i)
      scenario.trajectories[i].points.push_back({step, agents[i].position});
  }
  return scenario;
}

std::vector<TrajectoryRecord> to_records(std::span<const Trajectory> trajectories) {
  std::vector<TrajectoryRecord> records;
  for (const Trajectory& t : trajectories)
    for (const TrajectoryPoint& p : t.points)
      records.push_back({p.frame_id, t.agent_id, p.position.x, p.position.y});
  std::sort(records.begin(), records.end(), [](const TrajectoryRecord& a, const TrajectoryRecord& b) {
    return a.frame_id != b.frame_id ? a.frame_id < b.frame_id : a.vehicle_id < b.vehicle_id;
  });
  return records;
}

void NoiseModel::validate() const {
  if (position_sigma < 0.0) throw ConfigError("noise.position_sigma must be non-negative");
  if (miss_rate < 0.0 || miss_rate > 1.0) throw ConfigError("noise.miss_rate must lie in [0, 1]");
  if (false_positive_rate < 0.0) throw ConfigError("noise.false_positive_rate must be non-negative");
  if (bbox_jitter < 0.0 || bbox_jitter >= 1.0) throw ConfigError("noise.bbox_jitter must lie in [0, 1)");
}

std::vector<Detection> corrupt_detections(std::span<const Trajectory> truth,
                                          const std::unordered_map<int, AgentClass>& classes, const NoiseModel& noise,
                                          const Homography& pixel_to_world, const ClassDefaults& defaults,
                                          std::pair<double, double> pixel_extent) {
  noise.validate();
  if (pixel_extent.first <= 0.0 || pixel_extent.second <= 0.0) throw ConfigError("pixel extent must be positive");
  const Homography world_to_pixel = pixel_to_world.inverse();

  // Pixel-space box for a class footprint centered at a world point: the
  // axis-aligned hull of the projected world-axis extents.
  const auto box_at = [&](WorldPoint center, AgentClass cls) {
    const AgentSize size = defaults.size_of(cls);
    const PixelPoint xp = project_to_pixel(world_to_pixel, center + Vec2{size.length / 2.0, 0.0});
    const PixelPoint xm = project_to_pixel(world_to_pixel, center - Vec2{size.length / 2.0, 0.0});
    const PixelPoint yp = project_to_pixel(world_to_pixel, center + Vec2{0.0, size.width / 2.0});
    const PixelPoint ym = project_to_pixel(world_to_pixel, center - Vec2{0.0, size.width / 2.0});
    const double w = std::max({std::abs(xp.u - xm.u), std::abs(yp.u - ym.u), 1.0});
    const double h = std::max({std::abs(xp.v - xm.v), std::abs(yp.v - ym.v), 1.0});
    return std::pair<double, double>{w, h};
  };

  struct Entry {
    int agent_index;
    const TrajectoryPoint* point;
  };
  std::map<int, std::vector<Entry>> by_frame;  // ordered frames; entries keep input order
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!classes.contains(truth[i].agent_id))
      throw ConfigError("no class entry for agent " + std::to_string(truth[i].agent_id));
    for (const TrajectoryPoint& p : truth[i].points)
      by_frame[p.frame_id].push_back({static_cast<int>(i), &p});
  }

  std::mt19937_64 rng(noise.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(-noise.bbox_jitter, noise.bbox_jitter);
  std::uniform_real_distribution<double> fp_conf(0.3, 0.6);
  std::uniform_real_distribution<double> fp_x(0.0, pixel_extent.first);
  std::uniform_real_distribution<double> fp_y(0.0, pixel_extent.second);

  std::vector<Detection> detections;
  for (const auto& [frame, entries] : by_frame) {
    for (const Entry& e : entries) {
      if (noise.miss_rate > 0.0 && unit(rng) < noise.miss_rate) continue;
      const AgentClass cls = classes.at(truth[e.agent_index].agent_id);
      const WorldPoint center =
          e.point->position + Vec2{noise.position_sigma * gauss(rng), noise.position_sigma * gauss(rng)};
      const PixelPoint px = project_to_pixel(world_to_pixel, center);
      auto [w, h] = box_at(center, cls);
      if (noise.bbox_jitter > 0.0) {
        w *= std::max(1.0 + jitter(rng), 0.05);
        h *= std::max(1.0 + jitter(rng), 0.05);
      }
      detections.push_back(make_detection(frame, px.u - w / 2.0, px.v - h / 2.0, w, h, cls, 0.9));
    }
    if (noise.false_positive_rate > 0.0) {
      std::poisson_distribution<int> fp_count(noise.false_positive_rate);
      const int n_fp = fp_count(rng);
      for (int i = 0; i < n_fp; ++i) {
        const PixelPoint px{fp_x(rng), fp_y(rng)};
        const WorldPoint center = project_to_world(pixel_to_world, px);
        auto [w, h] = box_at(center, AgentClass::Other);
        detections.push_back(
            make_detection(frame, px.u - w / 2.0, px.v - h / 2.0, w, h, AgentClass::Other, fp_conf(rng)));
      }
    }
  }
  return detections;
}

Homography camera_for_arena(double arena_width, double arena_height, std::pair<double, double> pixel_extent) {
  if (arena_width <= 0.0 || arena_height <= 0.0) throw ConfigError("arena extents must be positive");
  if (pixel_extent.first <= 0.0 || pixel_extent.second <= 0.0) throw ConfigError("pixel extent must be positive");
  const double pw = pixel_extent.first;
  const double ph = pixel_extent.second;
  // Image bottom edge covers the near side of the arena (y = 0), the top
  // edge sees the far side (y = arena_height) foreshortened by 15% per side.
  const PixelPoint pixels[4] = {{0.0, ph}, {pw, ph}, {0.0, 0.0}, {pw, 0.0}};
  const WorldPoint world[4] = {{0.0, 0.0},
                               {arena_width, 0.0},
                               {0.15 * arena_width, arena_height},
                               {0.85 * arena_width, arena_height}};
  return estimate_homography(pixels, world);
}

}  // namespace trackpred
