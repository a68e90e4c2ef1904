// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trackpred/layers.hpp"

namespace trackpred {

/// Every tunable in one flat struct, populated from `section.key = value`
/// lines. Unknown keys are rejected; each value is range-checked with the
/// offending key named in the error.
struct RunConfig {
  // run
  std::string out_dir = "out";
  double fps = 30.0;
  std::uint64_t seed = 1;
  // camera
  double pixel_width = 1920.0;
  double pixel_height = 1080.0;
  // tracker
  int confirm_hits = 3;
  int max_misses = 5;
  double gate_distance = 4.0;
  double w_dist = 0.6;
  double w_iou = 0.4;
  double w_app = 0.0;
  double alpha = 0.7;
  double min_confidence = 0.0;
  // orca
  double time_horizon = 2.0;
  double neighbor_radius = 15.0;
  // dataset
  double tau = 3.0;
  double k = 5.0;
  int stride = 5;
  int grid_rows = 13;
  int grid_cols = 3;
  double cell_long = 2.0;
  double cell_lat = 4.0;
  double horizon_fov = 3.14159265358979323846;
  double horizon_range = 30.0;
  double neighbor_fov = 2.0 * 3.14159265358979323846;
  double neighbor_range = 15.0;
  int max_gap = 5;
  // model
  int hidden_size = 64;
  int conv_channels = 8;
  std::string activation = "relu";
  // train
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 0.005;
  double grad_clip = 5.0;
  // scenario
  int n_agents = 10;
  int n_videos = 5;
  double arena_width = 100.0;
  double arena_height = 60.0;
  double duration = 20.0;
  double speed_scale = 1.0;  // multiplies every class-default speed
  // noise
  std::vector<double> sigma_tiers = {0.0, 0.2};
  double miss_rate = 0.1;
  double false_positive_rate = 0.5;
  double bbox_jitter = 0.05;
};

/// Which subcommands read a key; used to scope --help listings.
enum CommandMask : unsigned {
  kCmdTrack = 1u << 0,
  kCmdDataset = 1u << 1,
  kCmdTrain = 1u << 2,
  kCmdPredict = 1u << 3,
  kCmdEval = 1u << 4,
  kCmdBench = 1u << 5,
  kCmdSynth = 1u << 6,
  kCmdPipeline = 1u << 7,
  kCmdAll = 0xFFu,
};

/// Parses and assigns one key. Throws ConfigError naming the key for unknown
/// keys, malformed values, and range violations.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

RunConfig load_run_config(const std::filesystem::path& path);

/// "key (default): description" lines for the keys a command reads.
std::string config_keys_help(unsigned command_mask);

Activation parse_activation(const std::string& name);  // {"tanh", "relu"}

}  // namespace trackpred
