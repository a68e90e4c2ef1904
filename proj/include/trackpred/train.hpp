// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "trackpred/dataset.hpp"
#include "trackpred/model.hpp"

namespace trackpred {

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 0.005;
  double grad_clip = 5.0;  // global-norm ceiling per batch
  std::uint64_t seed = 1;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ModelParams params;  // snapshot from the best-validation epoch
  std::vector<EpochStats> log;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

/// Model shapes implied by how the dataset was windowed.
ModelConfig model_config_for(const WindowParams& params, int hidden_size = 64, int conv_channels = 8,
                             Activation activation = Activation::Relu);

/// Mean per-sample loss at fixed parameters.
double mean_loss(const ModelParams& params, std::span<const Sample> samples);

/// Minibatch gradient descent with a seeded shuffle each epoch and
/// global-norm gradient clipping. Deterministic in (data, configs). When the
/// validation set is empty the training loss stands in for selection. Epoch
/// lines go to `log_stream` when given.
TrainResult train(std::span<const Sample> train_set, std::span<const Sample> val_set, const ModelConfig& model_cfg,
                  const TrainConfig& cfg, std::ostream* log_stream = nullptr);

}  // namespace trackpred
