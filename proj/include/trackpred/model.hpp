// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trackpred/dataset.hpp"
#include "trackpred/layers.hpp"
#include "trackpred/types.hpp"

namespace trackpred {

/// Shape and activation choices for the interaction-aware predictor. The
/// encoder consumes per-step ego displacements; each occupancy grid passes
/// through a valid convolution, the activation, and one recurrent-cell step;
/// the decoder starts from the concatenated embeddings and emits one
/// displacement per future step, feeding each back as the next input.
struct ModelConfig {
  int history_points = 90;  // points per history window
  int horizon_steps = 150;  // future steps to emit
  int grid_rows = 13;
  int grid_cols = 3;
  int grid_features = 13;
  int hidden_size = 64;
  int conv_channels = 8;
  int conv_kernel = 3;
  Activation activation = Activation::Relu;

  int hidden_ego() const { return hidden_size; }
  int hidden_stream() const { return hidden_size / 2 > 2 ? hidden_size / 2 : 2; }
  int decoder_hidden() const { return hidden_ego() + 2 * hidden_stream(); }
  int conv_out_rows() const { return grid_rows - conv_kernel + 1; }
  int conv_out_cols() const { return grid_cols - conv_kernel + 1; }
  int stream_input() const { return conv_channels * conv_out_rows() * conv_out_cols(); }
  std::size_t grid_size() const { return static_cast<std::size_t>(grid_rows) * grid_cols * grid_features; }

  void validate() const;  // throws ConfigError
};

struct ModelParams {
  ModelConfig cfg;
  LstmCell ego;               // input 2
  Conv2d conv_horizon;        // grid_features -> conv_channels
  LstmCell cell_horizon;      // input stream_input
  Conv2d conv_neighbor;
  LstmCell cell_neighbor;
  LstmCell decoder;           // input 2, hidden decoder_hidden
  Linear out;                 // decoder_hidden -> 2

  static ModelParams zeros(const ModelConfig& cfg);
  /// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) per tensor, deterministic in seed.
  static ModelParams seeded(const ModelConfig& cfg, std::uint64_t seed);
  std::size_t parameter_count() const;
};

/// Flat view over every learned tensor, in a fixed order shared by the
/// optimizer, the checkpoint format, and gradient containers.
std::vector<std::vector<double>*> tensor_list(ModelParams& p);
std::vector<const std::vector<double>*> tensor_list(const ModelParams& p);

struct ModelTrace {
  std::vector<LstmStepCache> ego_steps;
  std::vector<double> act_horizon, act_neighbor;  // post-activation conv maps
  LstmStepCache horizon_step, neighbor_step;
  std::vector<LstmStepCache> dec_steps;
  std::vector<std::array<double, 2>> dec_inputs;
  std::vector<Vec2> displacements;  // per-step, normalized frame
  std::vector<Vec2> cumulative;     // running sums of displacements
};

/// Positions relative to the anchor in the heading-aligned frame, one per
/// future step. Shapes are checked against params.cfg.
std::vector<Vec2> forward_normalized(const ModelParams& params, const Sample& sample, ModelTrace* trace = nullptr);

/// Same trajectory mapped back to world coordinates.
std::vector<WorldPoint> predict(const ModelParams& params, const Sample& sample);

/// Mean over the horizon of the squared Euclidean distance between
/// prediction and truth. Both in the same frame; the value is invariant to
/// the rigid normalization, so normalized and world frames agree.
double trajectory_loss(std::span<const Vec2> predicted, std::span<const Vec2> truth);

struct GradientResult {
  ModelParams grads;  // same shapes as the parameters
  double loss = 0.0;
};

/// Loss and exact reverse-mode parameter gradients against sample.future.
GradientResult gradient(const ModelParams& params, const Sample& sample);

/// Loss only (no gradients, no trace retention).
double sample_loss(const ModelParams& params, const Sample& sample);

}  // namespace trackpred
