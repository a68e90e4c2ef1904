// SPDX-License-Identifier: Apache-2.0
#include "trackpred/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "trackpred/errors.hpp"
#include "trackpred/kernels.hpp"

namespace trackpred {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be positive");
  if (batch_size < 1) throw ConfigError("train.batch_size must be positive");
  if (learning_rate <= 0.0) throw ConfigError("train.learning_rate must be positive");
  if (grad_clip <= 0.0) throw ConfigError("train.grad_clip must be positive");
}

ModelConfig model_config_for(const WindowParams& params, int hidden_size, int conv_channels, Activation activation) {
  ModelConfig cfg;
  cfg.history_points = params.history_len();
  cfg.horizon_steps = params.future_len();
  cfg.grid_rows = params.grid.rows;
  cfg.grid_cols = params.grid.cols;
  cfg.grid_features = params.grid.features;
  cfg.hidden_size = hidden_size;
  cfg.conv_channels = conv_channels;
  cfg.activation = activation;
  cfg.validate();
  return cfg;
}

double mean_loss(const ModelParams& params, std::span<const Sample> samples) {
  if (samples.empty()) throw EmptyDataset("cannot evaluate loss on an empty set");
  double acc = 0.0;
  for (const Sample& s : samples) acc += sample_loss(params, s);
  return acc / static_cast<double>(samples.size());
}

TrainResult train(std::span<const Sample> train_set, std::span<const Sample> val_set, const ModelConfig& model_cfg,
                  const TrainConfig& cfg, std::ostream* log_stream) {
  cfg.validate();
  model_cfg.validate();
  if (train_set.empty()) throw EmptyDataset("training set is empty");

  ModelParams params = ModelParams::seeded(model_cfg, cfg.seed);
  std::mt19937_64 rng(cfg.seed);

  TrainResult result;
  result.params = params;
  result.best_val_loss = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  ModelParams grads = ModelParams::zeros(model_cfg);
  const std::vector<std::vector<double>*> param_tensors = tensor_list(params);
  const std::vector<std::vector<double>*> grad_tensors = tensor_list(grads);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      for (std::vector<double>* g : grad_tensors) std::fill(g->begin(), g->end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        GradientResult g = gradient(params, train_set[order[i]]);
        loss_sum += g.loss;
        const std::vector<std::vector<double>*> sample_tensors = tensor_list(g.grads);
        for (std::size_t t = 0; t < grad_tensors.size(); ++t)
          kernels::axpy(1.0, sample_tensors[t]->data(), grad_tensors[t]->data(), grad_tensors[t]->size());
      }

      const double inv_batch = 1.0 / static_cast<double>(end - start);
      double norm_sq = 0.0;
      for (std::vector<double>* g : grad_tensors) {
        for (double& v : *g) v *= inv_batch;
        norm_sq += kernels::sum_sq(g->data(), g->size());
      }
      const double norm = std::sqrt(norm_sq);
      const double clip_scale = norm > cfg.grad_clip ? cfg.grad_clip / norm : 1.0;
      for (std::size_t t = 0; t < grad_tensors.size(); ++t)
        kernels::axpy(-cfg.learning_rate * clip_scale, grad_tensors[t]->data(), param_tensors[t]->data(),
                      param_tensors[t]->size());
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(train_set.size());
    stats.val_loss = val_set.empty() ? stats.train_loss : mean_loss(params, val_set);
    result.log.push_back(stats);
    if (log_stream != nullptr)
      (*log_stream) << "epoch " << epoch << " train_loss " << stats.train_loss << " val_loss " << stats.val_loss
                    << '\n';
    if (stats.val_loss < result.best_val_loss) {
      result.best_val_loss = stats.val_loss;
      result.best_epoch = epoch;
      result.params = params;
    }
  }
  return result;
}

}  // namespace trackpred
