// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "trackpred/assignment.hpp"
#include "trackpred/homography.hpp"
#include "trackpred/orca.hpp"
#include "trackpred/types.hpp"

namespace trackpred {

/// Row-major boolean mask, h rows by w cols.
struct BoolMask {
  int w = 0;
  int h = 0;
  std::vector<std::uint8_t> data;
};

/// Axis-aligned pixel box: top-left x, y, then width and height.
using PixelBox = std::array<double, 4>;

struct Detection {
  int frame_id = 0;
  PixelBox bbox{0, 0, 0, 0};
  double scale = 0.0;   // bbox area proxy, derived from w*h when not given
  double aspect = 0.0;  // w/h, derived when not given
  AgentClass cls = AgentClass::Other;
  double confidence = 1.0;
  std::optional<std::vector<double>> appearance;
  std::optional<BoolMask> mask;
};

Detection make_detection(int frame_id, double x, double y, double w, double h, AgentClass cls, double confidence);

/// Bbox plus its foreground mask. Only defined for masks that fit the bbox
/// and select at least one pixel.
struct SegmentedPatch {
  PixelBox bbox{0, 0, 0, 0};
  BoolMask mask;
  int pixel_count = 0;
};

/// Throws MissingMask when d has no mask, ShapeMismatch when the mask does
/// not match the bbox size, Error when the mask selects nothing.
SegmentedPatch masked_representation(const Detection& d);

/// Bbox center pushed through the pixel -> world calibration.
WorldPoint detection_center_world(const Detection& d, const Homography& pixel_to_world);

double iou(const PixelBox& a, const PixelBox& b);

enum class TrackStatus { Tentative, Confirmed, Deleted };

struct Track {
  int id = 0;
  AgentClass cls = AgentClass::Other;
  TrackStatus status = TrackStatus::Tentative;
  WorldPoint position;
  Vec2 velocity;
  int hits = 0;
  int time_since_update = 0;
  PixelBox last_bbox{0, 0, 0, 0};
  std::optional<std::vector<double>> appearance;
  std::vector<TrajectoryPoint> history;  // frames with an associated detection
};

struct TrackerConfig {
  Homography pixel_to_world;
  double fps = 30.0;
  int confirm_hits = 3;     // consecutive detections before a track is Confirmed
  int max_misses = 5;       // confirmed tracks survive this many missed frames
  double gate_distance = 4.0;  // meters
  double w_dist = 0.6;
  double w_iou = 0.4;
  double w_app = 0.0;
  double alpha = 0.7;  // measurement weight in the state blend
  double min_confidence = 0.0;
  OrcaParams orca;
  ClassDefaults classes = ClassDefaults::standard();
};

/// Gated association costs, |tracks| rows by |detections| cols. Tracks are
/// taken at their predicted state for this frame. Class mismatches and world
/// distances beyond the gate are kForbidden; the appearance term drops out
/// (with the remaining weights renormalized) when either side lacks a vector.
CostMatrix association_cost(std::span<const Track> predicted, std::span<const Detection> dets,
                            const TrackerConfig& cfg, const Homography& world_to_pixel);

/// Tracking-by-detection with an interaction-aware motion prior: every frame,
/// live tracks advance by the reciprocal-avoidance prediction against the
/// other live tracks, then matched detections pull the state back by an
/// exponential blend.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg);

  /// Consumes all detections of one frame. Frames must arrive consecutively;
  /// pass an empty span for frames without detections. Throws FrameOutOfOrder
  /// when the frame id is not the next expected one and Error when the
  /// detections disagree on their frame id.
  void process_frame(int frame_id, std::span<const Detection> dets);

  const std::vector<Track>& live_tracks() const { return live_; }
  /// Every track that ever reached Confirmed, including since-deleted ones.
  std::vector<Track> confirmed_tracks() const;

  int frames_processed() const { return frames_processed_; }

 private:
  void begin_frame(int frame_id, std::span<const Detection>& dets);

  TrackerConfig cfg_;
  Homography world_to_pixel_;
  std::vector<Track> live_;
  std::vector<Track> finished_;  // deleted tracks that had been confirmed
  int next_id_ = 1;
  std::optional<int> expected_frame_;
  int frames_processed_ = 0;
};

/// Trajectory-file export: one `frame,id,x,y` line per (frame, confirmed
/// track) history entry, 6 decimals, sorted by frame then id.
void export_trajectories(std::span<const Track> tracks, const std::filesystem::path& path);

/// Class sidecar export: `vehicle_id,class` per confirmed track, sorted by id.
void export_track_classes(std::span<const Track> tracks, const std::filesystem::path& path);

/// Detection CSV: header `frame_id,x,y,w,h,class,confidence[,app_0..]`.
std::vector<Detection> read_detection_file(const std::filesystem::path& path);
void write_detection_file(std::span<const Detection> dets, const std::filesystem::path& path);

}  // namespace trackpred
