// SPDX-License-Identifier: Apache-2.0
#include "trackpred/benchmark.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "trackpred/errors.hpp"

namespace trackpred {
namespace {

std::string format_cell(double a, double f) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f/%.2f", a, f);
  return buf;
}

std::string format_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

BenchmarkResult run_benchmark(const WindowedData& data, std::span<const BenchmarkMethod> methods, double fps,
                              std::span<const double> horizons) {
  if (data.samples.empty()) throw EmptyDataset("benchmark needs at least one sample");
  if (data.scenes.size() != data.samples.size()) throw LengthMismatch("samples and scenes are not parallel");
  {
    std::set<std::string> names;
    for (const BenchmarkMethod& m : methods)
      if (!names.insert(m.name).second) throw ConfigError("duplicate benchmark method name: " + m.name);
  }

  std::vector<std::vector<WorldPoint>> truths;
  truths.reserve(data.samples.size());
  for (const Sample& s : data.samples) truths.push_back(future_world(s));

  BenchmarkResult result;
  for (const BenchmarkMethod& method : methods) {
    try {
      if (static_cast<bool>(method.predict) == !method.prediction_file.empty())
        throw ConfigError("method must define exactly one of predictor and prediction file");

      std::vector<std::vector<WorldPoint>> preds;
      if (method.predict) {
        preds.reserve(data.samples.size());
        for (std::size_t i = 0; i < data.samples.size(); ++i)
          preds.push_back(method.predict(data.samples[i], data.scenes[i]));
      } else {
        preds = read_prediction_file(method.prediction_file, data.samples);
      }
      for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i].size() != truths[i].size())
          throw MethodFailure(method.name, "prediction length mismatch at sample " + std::to_string(i));

      MetricsReport report;
      report.method = method.name;
      report.n_samples = data.samples.size();
      for (std::size_t i = 0; i < preds.size(); ++i) {
        report.ade += ade(preds[i], truths[i]);
        report.fde += fde(preds[i], truths[i]);
      }
      report.ade /= static_cast<double>(preds.size());
      report.fde /= static_cast<double>(preds.size());
      report.rmse_curve = rmse_curve(preds, truths, fps, horizons);
      result.reports.push_back(std::move(report));
    } catch (const Error& e) {
      result.failures.emplace_back(method.name, e.what());
    }
  }
  return result;
}

std::string render_table(const BenchmarkResult& result) {
  std::size_t name_w = std::string("method").size();
  std::size_t cell_w = std::string("ADE/FDE (m)").size();
  for (const MetricsReport& r : result.reports) {
    name_w = std::max(name_w, r.method.size());
    cell_w = std::max(cell_w, format_cell(r.ade, r.fde).size());
  }
  std::ostringstream out;
  out << "method" << std::string(name_w - 6, ' ') << "  ADE/FDE (m)" << std::string(cell_w - 11, ' ') << "  samples\n";
  out << std::string(name_w, '-') << "  " << std::string(cell_w, '-') << "  -------\n";
  for (const MetricsReport& r : result.reports) {
    const std::string cell = format_cell(r.ade, r.fde);
    out << r.method << std::string(name_w - r.method.size(), ' ') << "  " << cell
        << std::string(cell_w - cell.size(), ' ') << "  " << r.n_samples << '\n';
  }
  out << "ADE and FDE are means of per-sample values.\n";
  for (const auto& [name, reason] : result.failures) out << "FAILED " << name << ": " << reason << '\n';
  return out.str();
}

std::string render_table_csv(const BenchmarkResult& result) {
  std::ostringstream out;
  out << "method,ade_m,fde_m,n_samples\n";
  for (const MetricsReport& r : result.reports)
    out << r.method << ',' << format_num(r.ade) << ',' << format_num(r.fde) << ',' << r.n_samples << '\n';
  return out.str();
}

std::string render_curve_csv(const BenchmarkResult& result) {
  std::ostringstream out;
  out << "horizon_s";
  for (const MetricsReport& r : result.reports) out << ',' << r.method;
  out << '\n';
  if (result.reports.empty()) return out.str();
  const std::size_t rows = result.reports.front().rmse_curve.size();
  for (const MetricsReport& r : result.reports)
    if (r.rmse_curve.size() != rows) throw LengthMismatch("reports carry different curve horizons");
  for (std::size_t i = 0; i < rows; ++i) {
    out << format_num(result.reports.front().rmse_curve[i].first);
    for (const MetricsReport& r : result.reports) out << ',' << format_num(r.rmse_curve[i].second);
    out << '\n';
  }
  return out.str();
}

void write_prediction_file(const std::filesystem::path& path, std::span<const Sample> samples,
                           std::span<const std::vector<WorldPoint>> predictions) {
  if (samples.size() != predictions.size()) throw LengthMismatch("samples and predictions are not parallel");
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write prediction file: " + path.string());
  out << "sample_id,frame_id,vehicle_id,x,y\n";
  char buf[160];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = 0; j < predictions[i].size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%.6f,%.6f\n", i, samples[i].anchor_frame + static_cast<int>(j) + 1,
                    samples[i].ego_id, predictions[i][j].x, predictions[i][j].y);
      out << buf;
    }
  }
  if (!out) throw IoFailure("failed writing prediction file: " + path.string());
}

std::vector<std::vector<WorldPoint>> read_prediction_file(const std::filesystem::path& path,
                                                          std::span<const Sample> samples) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open prediction file: " + path.string());

  // frame -> point, per sample; maps catch duplicates and gaps alike.
  std::vector<std::map<int, WorldPoint>> rows(samples.size());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("sample_id", 0) == 0) continue;
    long sample_id = 0, frame = 0, vehicle = 0;
    double x = 0.0, y = 0.0;
    char trailing = 0;
    if (std::sscanf(line.c_str(), "%ld,%ld,%ld,%lf,%lf %c", &sample_id, &frame, &vehicle, &x, &y, &trailing) != 5)
      throw ParseError(line_no, "expected sample_id,frame_id,vehicle_id,x,y");
    if (sample_id < 0 || static_cast<std::size_t>(sample_id) >= samples.size())
      throw MethodFailure("prediction file", "unknown sample id " + std::to_string(sample_id));
    const Sample& s = samples[static_cast<std::size_t>(sample_id)];
    if (vehicle != s.ego_id)
      throw MethodFailure("prediction file", "vehicle id mismatch for sample " + std::to_string(sample_id));
    if (!rows[static_cast<std::size_t>(sample_id)].emplace(static_cast<int>(frame), WorldPoint{x, y}).second)
      throw MethodFailure("prediction file", "duplicate frame for sample " + std::to_string(sample_id));
  }

  std::vector<std::vector<WorldPoint>> preds(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t want = samples[i].future.size();
    if (rows[i].size() != want)
      throw MethodFailure("prediction file", "sample " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                                 " rows, expected " + std::to_string(want));
    preds[i].reserve(want);
    int expect = samples[i].anchor_frame + 1;
    for (const auto& [frame, point] : rows[i]) {
      if (frame != expect)
        throw MethodFailure("prediction file", "sample " + std::to_string(i) + " misses frame " + std::to_string(expect));
      preds[i].push_back(point);
      ++expect;
    }
  }
  return preds;
}

}  // namespace trackpred
