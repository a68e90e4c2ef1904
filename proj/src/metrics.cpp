// SPDX-License-Identifier: Apache-2.0
#include "trackpred/metrics.hpp"

#include <cmath>

#include "trackpred/errors.hpp"

namespace trackpred {

double ade(std::span<const WorldPoint> pred, std::span<const WorldPoint> truth) {
  if (pred.size() != truth.size()) throw LengthMismatch("prediction and truth lengths differ");
  if (pred.empty()) throw LengthMismatch("displacement error needs at least one point");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += norm(pred[i] - truth[i]);
  return acc / static_cast<double>(pred.size());
}

double fde(std::span<const WorldPoint> pred, std::span<const WorldPoint> truth) {
  if (pred.size() != truth.size()) throw LengthMismatch("prediction and truth lengths differ");
  if (pred.empty()) throw LengthMismatch("displacement error needs at least one point");
  return norm(pred.back() - truth.back());
}

std::vector<std::pair<double, double>> rmse_curve(std::span<const std::vector<WorldPoint>> preds,
                                                  std::span<const std::vector<WorldPoint>> truths, double fps,
                                                  std::span<const double> horizons) {
  if (preds.size() != truths.size()) throw LengthMismatch("prediction and truth sample counts differ");
  if (preds.empty()) throw EmptyDataset("rmse curve needs at least one sample");
  if (fps <= 0.0) throw ConfigError("fps must be positive");
  for (std::size_t i = 1; i < horizons.size(); ++i)
    if (horizons[i] <= horizons[i - 1]) throw ConfigError("curve horizons must be strictly increasing");

  std::vector<std::pair<double, double>> curve;
  curve.reserve(horizons.size());
  for (const double h : horizons) {
    if (h <= 0.0) throw ConfigError("curve horizons must be positive");
    const long step = std::lround(h * fps);
    if (step < 1) throw ConfigError("curve horizon is below one frame");
    const std::size_t idx = static_cast<std::size_t>(step) - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (preds[i].size() != truths[i].size()) throw LengthMismatch("prediction and truth lengths differ");
      if (idx >= preds[i].size()) throw LengthMismatch("curve horizon exceeds the prediction length");
      acc += norm_sq(preds[i][idx] - truths[i][idx]);
    }
    curve.emplace_back(h, std::sqrt(acc / static_cast<double>(preds.size())));
  }
  return curve;
}

}  // namespace trackpred
