// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trackpred/dataset.hpp"
#include "trackpred/homography.hpp"
#include "trackpred/orca.hpp"
#include "trackpred/tracker.hpp"
#include "trackpred/types.hpp"

namespace trackpred {

/// Synthetic traffic scene: lane-structured opposing flows along both arena
/// axes so paths cross, agents drawn from a class mix with class-default
/// footprints and speeds.
struct ScenarioSpec {
  int n_agents = 10;
  std::map<AgentClass, double> class_mix = {{AgentClass::Car, 0.4},        {AgentClass::Pedestrian, 0.2},
                                            {AgentClass::Motorcycle, 0.15}, {AgentClass::Rickshaw, 0.1},
                                            {AgentClass::Bicycle, 0.1},     {AgentClass::Bus, 0.05}};
  double arena_width = 100.0;   // meters, x extent
  double arena_height = 60.0;   // meters, y extent
  double density_target = 0.0;  // agents/km, informational only
  double duration = 20.0;       // seconds
  double fps = 30.0;
  std::uint64_t seed = 1;
  ClassDefaults classes = ClassDefaults::standard();
  OrcaParams orca;

  void validate() const;  // throws ConfigError
};

struct Scenario {
  std::vector<Trajectory> trajectories;  // one per agent, frames 0..steps
  std::unordered_map<int, AgentClass> classes;
};

/// Agents per kilometer along the longer arena axis (reported, not enforced).
double scenario_density_per_km(const ScenarioSpec& spec);

/// Deterministic in spec.seed. Start positions avoid overlap; placement gives
/// up with InfeasiblePlacement after 1000 rejected draws for one agent.
Scenario generate_scenario(const ScenarioSpec& spec);

std::vector<TrajectoryRecord> to_records(std::span<const Trajectory> trajectories);

/// Detection-stage corruption: isotropic world-space position noise,
/// back-projection to pixels, class-default boxes with relative size jitter,
/// Bernoulli misses, and Poisson false positives (class Other, confidence
/// uniform in [0.3, 0.6]) scattered over the pixel extent.
struct NoiseModel {
  double position_sigma = 0.0;  // meters
  double miss_rate = 0.0;
  double false_positive_rate = 0.0;  // Poisson mean per frame
  double bbox_jitter = 0.0;          // relative fraction of box size
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

std::vector<Detection> corrupt_detections(std::span<const Trajectory> truth,
                                          const std::unordered_map<int, AgentClass>& classes, const NoiseModel& noise,
                                          const Homography& pixel_to_world,
                                          const ClassDefaults& defaults = ClassDefaults::standard(),
                                          std::pair<double, double> pixel_extent = {1920.0, 1080.0});

/// Fixed oblique camera over the arena: the pixel frame maps onto a
/// trapezoid (far edge foreshortened) so the pixel-to-world projection is
/// genuinely perspective. Deterministic in its arguments.
Homography camera_for_arena(double arena_width, double arena_height,
                            std::pair<double, double> pixel_extent = {1920.0, 1080.0});

}  // namespace trackpred
