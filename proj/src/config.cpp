// SPDX-License-Identifier: Apache-2.0
#include "trackpred/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "trackpred/errors.hpp"

namespace trackpred {
namespace {

struct KeyInfo {
  const char* key;
  unsigned commands;
  const char* description;
  std::function<void(RunConfig&, const std::string&, const char*)> set;
  std::function<std::string(const RunConfig&)> show;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const char* key) {
  const char* begin = v.data();
  const char* end = begin + v.size();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(std::string(key) + " expects a number, got '" + v + "'");
  return out;
}

long long parse_int(const std::string& v, const char* key) {
  const char* begin = v.data();
  const char* end = begin + v.size();
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(std::string(key) + " expects an integer, got '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& v, const char* key) {
  const char* begin = v.data();
  const char* end = begin + v.size();
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(std::string(key) + " expects a non-negative integer, got '" + v + "'");
  return out;
}

using DoubleCheck = bool (*)(double);
using IntCheck = bool (*)(long long);

KeyInfo dbl_key(const char* key, unsigned cmds, double RunConfig::*field, const char* desc, DoubleCheck ok,
                const char* requirement) {
  return {key, cmds, desc,
          [field, ok, requirement](RunConfig& c, const std::string& v, const char* k) {
            const double value = parse_double(v, k);
            if (!ok(value)) throw ConfigError(std::string(k) + " " + requirement);
            c.*field = value;
          },
          [field](const RunConfig& c) {
            std::ostringstream s;
            s << c.*field;
            return s.str();
          }};
}

KeyInfo int_key(const char* key, unsigned cmds, int RunConfig::*field, const char* desc, IntCheck ok,
                const char* requirement) {
  return {key, cmds, desc,
          [field, ok, requirement](RunConfig& c, const std::string& v, const char* k) {
            const long long value = parse_int(v, k);
            if (!ok(value)) throw ConfigError(std::string(k) + " " + requirement);
            c.*field = static_cast<int>(value);
          },
          [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

bool positive(double v) { return v > 0.0; }
bool non_negative(double v) { return v >= 0.0; }
bool unit_range(double v) { return v >= 0.0 && v <= 1.0; }
bool jitter_range(double v) { return v >= 0.0 && v < 1.0; }
bool fov_range(double v) { return v > 0.0 && v <= 2.0 * 3.14159265358979323846 + 1e-12; }
bool at_least_1(long long v) { return v >= 1; }
bool at_least_2(long long v) { return v >= 2; }
bool non_negative_i(long long v) { return v >= 0; }

const std::vector<KeyInfo>& key_table() {
  static const std::vector<KeyInfo> table = [] {
    std::vector<KeyInfo> t;
    t.push_back({"run.out_dir", kCmdAll, "directory artifacts are written to",
                 [](RunConfig& c, const std::string& v, const char* k) {
                   if (v.empty()) throw ConfigError(std::string(k) + " must not be empty");
                   c.out_dir = v;
                 },
                 [](const RunConfig& c) { return c.out_dir; }});
    t.push_back(dbl_key("run.fps", kCmdAll, &RunConfig::fps, "frames per second of every stage", positive,
                        "must be positive"));
    t.push_back({"run.seed", kCmdAll, "master seed; stage seeds derive from it",
                 [](RunConfig& c, const std::string& v, const char* k) { c.seed = parse_u64(v, k); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});

    const unsigned synth_like = kCmdSynth | kCmdPipeline;
    t.push_back(dbl_key("camera.pixel_width", synth_like | kCmdTrack, &RunConfig::pixel_width,
                        "synthetic image width in pixels", positive, "must be positive"));
    t.push_back(dbl_key("camera.pixel_height", synth_like | kCmdTrack, &RunConfig::pixel_height,
                        "synthetic image height in pixels", positive, "must be positive"));

    const unsigned track_like = kCmdTrack | kCmdPipeline;
    t.push_back(int_key("tracker.confirm_hits", track_like, &RunConfig::confirm_hits,
                        "consecutive detections before a track is confirmed", at_least_1, "must be at least 1"));
    t.push_back(int_key("tracker.max_misses", track_like, &RunConfig::max_misses,
                        "missed frames a confirmed track survives", non_negative_i, "must be non-negative"));
    t.push_back(dbl_key("tracker.gate_distance", track_like, &RunConfig::gate_distance,
                        "association gate in meters", positive, "must be positive"));
    t.push_back(dbl_key("tracker.w_dist", track_like, &RunConfig::w_dist, "association weight on world distance",
                        non_negative, "must be non-negative"));
    t.push_back(dbl_key("tracker.w_iou", track_like, &RunConfig::w_iou, "association weight on bbox overlap",
                        non_negative, "must be non-negative"));
    t.push_back(dbl_key("tracker.w_app", track_like, &RunConfig::w_app, "association weight on appearance",
                        non_negative, "must be non-negative"));
    t.push_back(dbl_key("tracker.alpha", track_like, &RunConfig::alpha, "measurement weight in the state blend",
                        unit_range, "must lie in [0, 1]"));
    t.push_back(dbl_key("tracker.min_confidence", track_like, &RunConfig::min_confidence,
                        "detections below this confidence are dropped", unit_range, "must lie in [0, 1]"));

    const unsigned orca_like = kCmdTrack | kCmdSynth | kCmdBench | kCmdPipeline;
    t.push_back(dbl_key("orca.time_horizon", orca_like, &RunConfig::time_horizon,
                        "collision look-ahead in seconds", positive, "must be positive"));
    t.push_back(dbl_key("orca.neighbor_radius", orca_like, &RunConfig::neighbor_radius,
                        "interaction radius in meters", positive, "must be positive"));

    const unsigned data_like = kCmdDataset | kCmdPipeline;
    t.push_back(dbl_key("dataset.tau", data_like, &RunConfig::tau, "history window in seconds", positive,
                        "must be positive"));
    t.push_back(
        dbl_key("dataset.k", data_like, &RunConfig::k, "prediction horizon in seconds", positive, "must be positive"));
    t.push_back(int_key("dataset.stride", data_like, &RunConfig::stride, "frames between consecutive anchors",
                        at_least_1, "must be at least 1"));
    t.push_back(int_key("dataset.grid_rows", data_like, &RunConfig::grid_rows, "occupancy grid rows (longitudinal)",
                        at_least_1, "must be at least 1"));
    t.push_back(int_key("dataset.grid_cols", data_like, &RunConfig::grid_cols, "occupancy grid columns (lateral)",
                        at_least_1, "must be at least 1"));
    t.push_back(dbl_key("dataset.cell_long", data_like, &RunConfig::cell_long, "grid cell depth in meters", positive,
                        "must be positive"));
    t.push_back(dbl_key("dataset.cell_lat", data_like, &RunConfig::cell_lat, "grid cell width in meters", positive,
                        "must be positive"));
    t.push_back(dbl_key("dataset.horizon_fov", data_like, &RunConfig::horizon_fov,
                        "field of view of the horizon stream in radians", fov_range, "must lie in (0, 2*pi]"));
    t.push_back(dbl_key("dataset.horizon_range", data_like, &RunConfig::horizon_range,
                        "range of the horizon stream in meters", positive, "must be positive"));
    t.push_back(dbl_key("dataset.neighbor_fov", data_like, &RunConfig::neighbor_fov,
                        "field of view of the neighbor stream in radians", fov_range, "must lie in (0, 2*pi]"));
    t.push_back(dbl_key("dataset.neighbor_range", data_like, &RunConfig::neighbor_range,
                        "range of the neighbor stream in meters", positive, "must be positive"));
    t.push_back(int_key("dataset.max_gap", data_like, &RunConfig::max_gap,
                        "largest frame gap repaired by interpolation", non_negative_i, "must be non-negative"));

    const unsigned model_like = kCmdTrain | kCmdPipeline;
    t.push_back(int_key("model.hidden_size", model_like, &RunConfig::hidden_size, "encoder hidden width", at_least_2,
                        "must be at least 2"));
    t.push_back(int_key("model.conv_channels", model_like, &RunConfig::conv_channels,
                        "channels of the grid convolutions", at_least_1, "must be at least 1"));
    t.push_back({"model.activation", model_like, "stream activation: tanh or relu",
                 [](RunConfig& c, const std::string& v, const char* k) {
                   if (v != "tanh" && v != "relu") throw ConfigError(std::string(k) + " must be 'tanh' or 'relu'");
                   c.activation = v;
                 },
                 [](const RunConfig& c) { return c.activation; }});

    t.push_back(int_key("train.epochs", model_like, &RunConfig::epochs, "training epochs", at_least_1,
                        "must be at least 1"));
    t.push_back(int_key("train.batch_size", model_like, &RunConfig::batch_size, "minibatch size", at_least_1,
                        "must be at least 1"));
    t.push_back(dbl_key("train.learning_rate", model_like, &RunConfig::learning_rate, "gradient-descent step size",
                        positive, "must be positive"));
    t.push_back(dbl_key("train.grad_clip", model_like, &RunConfig::grad_clip, "global-norm gradient ceiling", positive,
                        "must be positive"));

    t.push_back(int_key("scenario.n_agents", synth_like, &RunConfig::n_agents, "agents per synthetic video",
                        at_least_1, "must be at least 1"));
    t.push_back(int_key("scenario.n_videos", synth_like, &RunConfig::n_videos, "synthetic videos to generate",
                        at_least_1, "must be at least 1"));
    t.push_back(dbl_key("scenario.arena_width", synth_like, &RunConfig::arena_width, "arena x extent in meters",
                        positive, "must be positive"));
    t.push_back(dbl_key("scenario.arena_height", synth_like, &RunConfig::arena_height, "arena y extent in meters",
                        positive, "must be positive"));
    t.push_back(dbl_key("scenario.duration", synth_like, &RunConfig::duration, "video length in seconds", positive,
                        "must be positive"));
    t.push_back(dbl_key("scenario.speed_scale", synth_like, &RunConfig::speed_scale,
                        "multiplier on every class-default speed", positive, "must be positive"));

    t.push_back({"noise.sigma_tiers", synth_like, "comma-separated detection-noise sigmas in meters",
                 [](RunConfig& c, const std::string& v, const char* k) {
                   std::vector<double> tiers;
                   std::string item;
                   std::istringstream ss(v);
                   while (std::getline(ss, item, ',')) {
                     const double sigma = parse_double(trim(item), k);
                     if (sigma < 0.0) throw ConfigError(std::string(k) + " entries must be non-negative");
                     tiers.push_back(sigma);
                   }
                   if (tiers.empty()) throw ConfigError(std::string(k) + " must list at least one sigma");
                   c.sigma_tiers = std::move(tiers);
                 },
                 [](const RunConfig& c) {
                   std::ostringstream s;
                   for (std::size_t i = 0; i < c.sigma_tiers.size(); ++i) {
                     if (i > 0) s << ',';
                     s << c.sigma_tiers[i];
                   }
                   return s.str();
                 }});
    t.push_back(dbl_key("noise.miss_rate", synth_like, &RunConfig::miss_rate, "per-detection drop probability",
                        unit_range, "must lie in [0, 1]"));
    t.push_back(dbl_key("noise.false_positive_rate", synth_like, &RunConfig::false_positive_rate,
                        "mean false positives per frame", non_negative, "must be non-negative"));
    t.push_back(dbl_key("noise.bbox_jitter", synth_like, &RunConfig::bbox_jitter,
                        "relative bbox size jitter", jitter_range, "must lie in [0, 1)"));
    return t;
  }();
  return table;
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const KeyInfo& info : key_table()) {
    if (key == info.key) {
      info.set(cfg, value, info.key);
      return;
    }
  }
  throw ConfigError("unknown config key: " + key);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open config file: " + path.string());
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value' in " + path.string());
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " [" + path.string() + ":" + std::to_string(line_no) + "]");
    }
  }
  return cfg;
}

std::string config_keys_help(unsigned command_mask) {
  const RunConfig defaults;
  std::ostringstream out;
  out << "Config keys read by this command:\n";
  for (const KeyInfo& info : key_table()) {
    if ((info.commands & command_mask) == 0) continue;
    out << "  " << info.key << " (default " << info.show(defaults) << "): " << info.description << '\n';
  }
  return out.str();
}

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  throw ConfigError("model.activation must be 'tanh' or 'relu'");
}

}  // namespace trackpred
