// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trackpred/types.hpp"

namespace trackpred {

/// Mean per-frame Euclidean distance between paired positions.
double ade(std::span<const WorldPoint> pred, std::span<const WorldPoint> truth);

/// Euclidean distance between the final positions.
double fde(std::span<const WorldPoint> pred, std::span<const WorldPoint> truth);

/// Root-mean-square displacement across samples at fixed look-ahead times.
/// Horizon h seconds reads prediction step round(h*fps); horizons must be
/// positive, strictly increasing, and within every trajectory.
std::vector<std::pair<double, double>> rmse_curve(std::span<const std::vector<WorldPoint>> preds,
                                                  std::span<const std::vector<WorldPoint>> truths, double fps,
                                                  std::span<const double> horizons);

struct MetricsReport {
  std::string method;
  double ade = 0.0;  // mean of per-sample ADEs
  double fde = 0.0;  // mean of per-sample final displacements
  std::vector<std::pair<double, double>> rmse_curve;  // (horizon_s, rmse_m)
  std::size_t n_samples = 0;
};

inline constexpr double kDefaultCurveHorizons[] = {1.0, 2.0, 3.0, 4.0, 5.0};

}  // namespace trackpred
