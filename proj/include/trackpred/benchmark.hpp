// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "trackpred/dataset.hpp"
#include "trackpred/metrics.hpp"

namespace trackpred {

using Predictor = std::function<std::vector<WorldPoint>(const Sample&, const AnchorScene&)>;

/// A named prediction method: either a callable or a prediction file written
/// by an external tool (exactly one of the two).
struct BenchmarkMethod {
  std::string name;
  Predictor predict;
  std::filesystem::path prediction_file;
};

struct BenchmarkResult {
  std::vector<MetricsReport> reports;                         // successful methods, input order
  std::vector<std::pair<std::string, std::string>> failures;  // (method, reason)
};

/// Evaluates every method over the identical sample set. A failing method is
/// reported in `failures` and does not abort the others.
BenchmarkResult run_benchmark(const WindowedData& data, std::span<const BenchmarkMethod> methods, double fps,
                              std::span<const double> horizons);

/// Aligned text table with "ADE/FDE" cells at two decimals.
std::string render_table(const BenchmarkResult& result);
/// Machine-readable equivalents: per-method metrics and the horizon curves.
std::string render_table_csv(const BenchmarkResult& result);
std::string render_curve_csv(const BenchmarkResult& result);

/// Prediction interchange: `sample_id,frame_id,vehicle_id,x,y` per line,
/// sample_id being the position of the sample in the dataset file. On read,
/// rows must cover each sample's horizon exactly, with the sample's ego id
/// and consecutive frames after the anchor; anything else is a MethodFailure.
void write_prediction_file(const std::filesystem::path& path, std::span<const Sample> samples,
                           std::span<const std::vector<WorldPoint>> predictions);
std::vector<std::vector<WorldPoint>> read_prediction_file(const std::filesystem::path& path,
                                                          std::span<const Sample> samples);

}  // namespace trackpred
