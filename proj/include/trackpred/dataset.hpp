// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "trackpred/types.hpp"

namespace trackpred {

/// One `<frame>,<id>,<x>,<y>` trajectory line.
struct TrajectoryRecord {
  int frame_id = 0;
  int vehicle_id = 0;
  double x = 0.0;
  double y = 0.0;
};

std::vector<TrajectoryRecord> parse_trajectory_file(const std::filesystem::path& path);
void write_trajectory_file(std::span<const TrajectoryRecord> records, const std::filesystem::path& path);

std::unordered_map<int, AgentClass> read_class_sidecar(const std::filesystem::path& path);
void write_class_sidecar(const std::unordered_map<int, AgentClass>& classes, const std::filesystem::path& path);

/// Ego-centric occupancy layout: `rows` cells of `cell_long` meters along the
/// heading axis by `cols` cells of `cell_lat` meters across, each holding a
/// `features`-length accumulator. Stored row-major [row][col][feature].
struct GridSpec {
  int rows = 13;
  int cols = 3;
  double cell_long = 2.0;
  double cell_lat = 4.0;
  int features = 13;

  std::size_t size() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * static_cast<std::size_t>(features);
  }
};

/// Snapshot of one agent at a sample's anchor frame.
struct NeighborState {
  int id = 0;
  AgentClass cls = AgentClass::Other;
  WorldPoint position;
  Vec2 velocity;
  Vec2 prev_velocity;
  double radius = 0.5;
};

/// All agents at the anchor frame; kept beside each sample so rollout-style
/// predictors can reconstruct the scene.
struct AnchorScene {
  NeighborState ego;
  std::vector<NeighborState> neighbors;
};

/// One training window in the anchor-relative frame: coordinates are
/// translated so the anchor (last history point) sits at the origin and
/// rotated so the recent heading points along +x.
struct Sample {
  int source_id = 0;  // which input video the window came from
  int ego_id = 0;
  AgentClass ego_class = AgentClass::Other;
  int anchor_frame = 0;
  WorldPoint anchor;
  double heading = 0.0;
  std::vector<Vec2> history;  // tau*fps points, last one is (0, 0)
  std::vector<Vec2> future;   // k*fps points
  std::vector<double> horizon_grid;
  std::vector<double> neighbor_grid;
};

/// Round trips between the sample's normalized frame and world coordinates.
WorldPoint sample_to_world(const Sample& sample, Vec2 normalized);
Vec2 sample_to_normalized(const Sample& sample, WorldPoint world);
std::vector<WorldPoint> future_world(const Sample& sample);
std::vector<WorldPoint> history_world(const Sample& sample);

struct WindowParams {
  double tau = 3.0;  // history seconds
  double k = 5.0;    // future seconds
  double fps = 30.0;
  int stride = 5;  // frames between consecutive anchors
  GridSpec grid;
  double horizon_fov = 3.14159265358979323846;  // forward-facing half-plane
  double horizon_range = 30.0;
  double neighbor_fov = 2.0 * 3.14159265358979323846;
  double neighbor_range = 15.0;
  int max_gap = 5;  // repaired by interpolation; larger gaps split
  ClassDefaults classes = ClassDefaults::standard();

  int history_len() const;
  int future_len() const;
};

struct WindowedData {
  std::vector<Sample> samples;
  std::vector<AnchorScene> scenes;  // parallel to samples
};

/// Windows every agent's (gap-repaired) trajectory with the given stride.
/// Emission order is deterministic: ascending agent id, then anchor frame.
WindowedData window_samples(std::span<const TrajectoryRecord> records, const WindowParams& params,
                            const std::unordered_map<int, AgentClass>& classes = {}, int source_id = 0);

/// Indices of `others` within `range` meters of the ego and inside the field
/// of view centered on `heading` (fov/2 to either side, boundary inclusive).
std::vector<std::size_t> horizon_neighbors(std::span<const NeighborState> others, const NeighborState& ego,
                                           double heading, double fov, double range);

/// Accumulates features_of(neighbor) into the grid cell covering each
/// neighbor in the ego frame (translated to ego, rotated so the heading is
/// +x). Neighbors outside the grid extent are dropped. `out` must hold
/// spec.size() doubles and is accumulated into, not cleared.
void occupancy_grid(std::span<const NeighborState> neighbors, const NeighborState& ego, double heading,
                    const GridSpec& spec, const std::function<std::vector<double>(const NeighborState&)>& features_of,
                    std::span<double> out);

inline constexpr int kHeterogeneousFeatures = kNumAgentClasses + 4;

/// Class one-hot, footprint (length, width), speed, and a heading-rate proxy
/// from the last two velocity headings (0 when either heading is undefined).
std::vector<double> heterogeneous_features(AgentClass cls, AgentSize size, Vec2 velocity, Vec2 prev_velocity,
                                           double fps);

/// Versioned binary sample container (little-endian).
void write_samples(const std::filesystem::path& path, const WindowedData& data, const WindowParams& params);
WindowedData read_samples(const std::filesystem::path& path, WindowParams* params_out = nullptr);

struct SplitIndices {
  std::vector<int> train, val, test;
};

/// Deterministic whole-video split, roughly 70/10/20 by count.
SplitIndices split_by_source(int n_sources, std::uint64_t seed);

}  // namespace trackpred
