// SPDX-License-Identifier: Apache-2.0
// Pipeline driver: tracking, dataset windowing, training, prediction,
// evaluation, benchmarking, and synthetic scenario generation, all driven by
// one flat config file. Exit codes: 0 success, 1 internal error, 2 bad input.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trackpred/baselines.hpp"
#include "trackpred/benchmark.hpp"
#include "trackpred/checkpoint.hpp"
#include "trackpred/config.hpp"
#include "trackpred/dataset.hpp"
#include "trackpred/errors.hpp"
#include "trackpred/homography.hpp"
#include "trackpred/metrics.hpp"
#include "trackpred/model.hpp"
#include "trackpred/synth.hpp"
#include "trackpred/tracker.hpp"
#include "trackpred/train.hpp"

namespace fs = std::filesystem;
using namespace trackpred;

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts, unsigned key_mask) {
  cmd->add_option("--config", opts.config_path, "config file with section.key = value lines");
  cmd->add_option("--set", opts.sets, "override one config key (key=value), repeatable");
  cmd->add_option("--seed", opts.seed, "override run.seed");
  cmd->add_option("--out", opts.out_dir, "override run.out_dir");
  cmd->footer(config_keys_help(key_mask));
}

RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty()) cfg = load_run_config(opts.config_path);
  for (const std::string& kv : opts.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  return cfg;
}

ClassDefaults scaled_classes(const RunConfig& cfg) {
  ClassDefaults d = ClassDefaults::standard();
  for (int i = 0; i < kNumAgentClasses; ++i) {
    d.pref_speed[i] *= cfg.speed_scale;
    d.max_speed[i] *= cfg.speed_scale;
  }
  return d;
}

OrcaParams orca_params(const RunConfig& cfg) {
  OrcaParams p;
  p.time_horizon = cfg.time_horizon;
  p.neighbor_radius = cfg.neighbor_radius;
  return p;
}

TrackerConfig tracker_config(const RunConfig& cfg, const Homography& pixel_to_world) {
  TrackerConfig tc;
  tc.pixel_to_world = pixel_to_world;
  tc.fps = cfg.fps;
  tc.confirm_hits = cfg.confirm_hits;
  tc.max_misses = cfg.max_misses;
  tc.gate_distance = cfg.gate_distance;
  tc.w_dist = cfg.w_dist;
  tc.w_iou = cfg.w_iou;
  tc.w_app = cfg.w_app;
  tc.alpha = cfg.alpha;
  tc.min_confidence = cfg.min_confidence;
  tc.orca = orca_params(cfg);
  tc.classes = scaled_classes(cfg);
  return tc;
}

WindowParams window_params(const RunConfig& cfg) {
  WindowParams wp;
  wp.tau = cfg.tau;
  wp.k = cfg.k;
  wp.fps = cfg.fps;
  wp.stride = cfg.stride;
  wp.grid.rows = cfg.grid_rows;
  wp.grid.cols = cfg.grid_cols;
  wp.grid.cell_long = cfg.cell_long;
  wp.grid.cell_lat = cfg.cell_lat;
  wp.grid.features = kHeterogeneousFeatures;
  wp.horizon_fov = cfg.horizon_fov;
  wp.horizon_range = cfg.horizon_range;
  wp.neighbor_fov = cfg.neighbor_fov;
  wp.neighbor_range = cfg.neighbor_range;
  wp.max_gap = cfg.max_gap;
  wp.classes = scaled_classes(cfg);
  return wp;
}

TrainConfig train_config(const RunConfig& cfg) {
  TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.learning_rate = cfg.learning_rate;
  tc.grad_clip = cfg.grad_clip;
  tc.seed = cfg.seed + 29;
  return tc;
}

ScenarioSpec scenario_spec(const RunConfig& cfg, int video) {
  ScenarioSpec spec;
  spec.n_agents = cfg.n_agents;
  spec.arena_width = cfg.arena_width;
  spec.arena_height = cfg.arena_height;
  spec.duration = cfg.duration;
  spec.fps = cfg.fps;
  spec.seed = cfg.seed + 1000ull * static_cast<std::uint64_t>(video + 1);
  spec.classes = scaled_classes(cfg);
  spec.orca = orca_params(cfg);
  return spec;
}

NoiseModel noise_model(const RunConfig& cfg, double sigma, int video, int tier) {
  NoiseModel n;
  n.position_sigma = sigma;
  n.miss_rate = cfg.miss_rate;
  n.false_positive_rate = cfg.false_positive_rate;
  n.bbox_jitter = cfg.bbox_jitter;
  n.seed = cfg.seed + 1000ull * static_cast<std::uint64_t>(video + 1) + 100ull * static_cast<std::uint64_t>(tier) + 7;
  return n;
}

std::vector<double> horizons_for(double k_seconds) {
  std::vector<double> h;
  for (int s = 1; s <= static_cast<int>(std::floor(k_seconds + 1e-9)); ++s) h.push_back(static_cast<double>(s));
  if (h.empty()) h.push_back(k_seconds);
  return h;
}

std::string sigma_label(double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sigma%.2f", sigma);
  return buf;
}

std::string format_loss(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// track

struct TrackStats {
  int frames = 0;
  std::size_t tracks = 0;
  double mean_length = 0.0;
};

TrackStats run_track_stage(const RunConfig& cfg, const fs::path& detections_path, const fs::path& homography_path,
                           const fs::path& out_dir) {
  const std::vector<Detection> dets = read_detection_file(detections_path);
  const Homography pixel_to_world = read_homography(homography_path);
  Tracker tracker(tracker_config(cfg, pixel_to_world));

  std::map<int, std::vector<Detection>> frames;
  for (const Detection& d : dets) frames[d.frame_id].push_back(d);
  if (!frames.empty()) {
    const int first = frames.begin()->first;
    const int last = frames.rbegin()->first;
    for (int frame = first; frame <= last; ++frame) {
      const auto it = frames.find(frame);
      if (it != frames.end())
        tracker.process_frame(frame, it->second);
      else
        tracker.process_frame(frame, {});
    }
  }

  fs::create_directories(out_dir);
  const std::vector<Track> tracks = tracker.confirmed_tracks();
  export_trajectories(tracks, out_dir / "trajectories.csv");
  export_track_classes(tracks, out_dir / "track_classes.csv");

  TrackStats stats;
  stats.frames = tracker.frames_processed();
  stats.tracks = tracks.size();
  for (const Track& t : tracks) stats.mean_length += static_cast<double>(t.history.size());
  if (!tracks.empty()) stats.mean_length /= static_cast<double>(tracks.size());
  return stats;
}

int run_track(const RunConfig& cfg, const std::string& detections, const std::string& homography) {
  const TrackStats stats = run_track_stage(cfg, detections, homography, cfg.out_dir);
  std::printf("frames %d tracks %zu mean_track_length %.1f\n", stats.frames, stats.tracks, stats.mean_length);
  std::printf("wrote %s and %s\n", (fs::path(cfg.out_dir) / "trajectories.csv").c_str(),
              (fs::path(cfg.out_dir) / "track_classes.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// make-dataset

void append_data(WindowedData& into, WindowedData&& from) {
  into.samples.insert(into.samples.end(), std::make_move_iterator(from.samples.begin()),
                      std::make_move_iterator(from.samples.end()));
  into.scenes.insert(into.scenes.end(), std::make_move_iterator(from.scenes.begin()),
                     std::make_move_iterator(from.scenes.end()));
}

struct DatasetCounts {
  std::size_t train = 0, val = 0, test = 0;
};

DatasetCounts make_dataset_stage(const RunConfig& cfg, std::span<const fs::path> trajectory_paths,
                                 std::span<const fs::path> class_paths, const fs::path& out_dir) {
  if (!class_paths.empty() && class_paths.size() != trajectory_paths.size())
    throw ConfigError("--classes must be given once per trajectory file or not at all");
  const WindowParams wp = window_params(cfg);

  std::vector<WindowedData> per_source;
  per_source.reserve(trajectory_paths.size());
  for (std::size_t i = 0; i < trajectory_paths.size(); ++i) {
    const std::vector<TrajectoryRecord> records = parse_trajectory_file(trajectory_paths[i]);
    std::unordered_map<int, AgentClass> classes;
    if (!class_paths.empty()) classes = read_class_sidecar(class_paths[i]);
    per_source.push_back(window_samples(records, wp, classes, static_cast<int>(i)));
  }

  const SplitIndices split = split_by_source(static_cast<int>(per_source.size()), cfg.seed + 17);
  WindowedData train_data, val_data, test_data;
  for (const int i : split.train) append_data(train_data, std::move(per_source[static_cast<std::size_t>(i)]));
  for (const int i : split.val) append_data(val_data, std::move(per_source[static_cast<std::size_t>(i)]));
  for (const int i : split.test) append_data(test_data, std::move(per_source[static_cast<std::size_t>(i)]));

  fs::create_directories(out_dir);
  write_samples(out_dir / "train.bin", train_data, wp);
  write_samples(out_dir / "val.bin", val_data, wp);
  write_samples(out_dir / "test.bin", test_data, wp);
  return {train_data.samples.size(), val_data.samples.size(), test_data.samples.size()};
}

int run_make_dataset(const RunConfig& cfg, const std::vector<std::string>& trajectories,
                     const std::vector<std::string>& classes) {
  const std::vector<fs::path> traj_paths(trajectories.begin(), trajectories.end());
  const std::vector<fs::path> class_paths(classes.begin(), classes.end());
  const DatasetCounts counts = make_dataset_stage(cfg, traj_paths, class_paths, cfg.out_dir);
  std::printf("samples train %zu val %zu test %zu\n", counts.train, counts.val, counts.test);
  std::printf("wrote %s/{train,val,test}.bin\n", cfg.out_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// train

fs::path train_stage(const RunConfig& cfg, const fs::path& train_path, const fs::path& val_path,
                     const fs::path& out_dir, std::ostream* progress) {
  WindowParams wp;
  const WindowedData train_data = read_samples(train_path, &wp);
  WindowedData val_data;
  if (!val_path.empty()) val_data = read_samples(val_path);

  const ModelConfig mc = model_config_for(wp, cfg.hidden_size, cfg.conv_channels, parse_activation(cfg.activation));
  const TrainConfig tc = train_config(cfg);
  const TrainResult result = train(train_data.samples, val_data.samples, mc, tc, progress);

  fs::create_directories(out_dir);
  const fs::path ckpt = out_dir / "model.ckpt";
  write_checkpoint(ckpt, result.params, tc);

  std::ofstream log(out_dir / "train_log.csv");
  if (!log) throw IoFailure("cannot write training log");
  log << "epoch,train_loss,val_loss\n";
  for (const EpochStats& s : result.log)
    log << s.epoch << ',' << format_loss(s.train_loss) << ',' << format_loss(s.val_loss) << '\n';

  if (progress != nullptr)
    (*progress) << "best epoch " << result.best_epoch << " val_loss " << format_loss(result.best_val_loss) << '\n';
  return ckpt;
}

int run_train(const RunConfig& cfg, const std::string& train_path, const std::string& val_path) {
  const fs::path ckpt = train_stage(cfg, train_path, val_path, cfg.out_dir, &std::cout);
  std::printf("wrote %s\n", ckpt.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// predict / eval / bench

int run_predict(const RunConfig& cfg, const std::string& model_path, const std::string& data_path) {
  const Checkpoint ck = read_checkpoint(model_path);
  const WindowedData data = read_samples(data_path);
  std::vector<std::vector<WorldPoint>> preds;
  preds.reserve(data.samples.size());
  for (const Sample& s : data.samples) preds.push_back(predict(ck.params, s));
  fs::create_directories(cfg.out_dir);
  const fs::path out = fs::path(cfg.out_dir) / "predictions.csv";
  write_prediction_file(out, data.samples, preds);
  std::printf("predicted %zu samples\nwrote %s\n", preds.size(), out.c_str());
  return 0;
}

int run_eval(const RunConfig& cfg, const std::string& data_path, const std::string& pred_path) {
  WindowParams wp;
  const WindowedData data = read_samples(data_path, &wp);
  BenchmarkMethod method;
  method.name = fs::path(pred_path).stem().string();
  method.prediction_file = pred_path;
  const std::vector<double> horizons = horizons_for(wp.k);
  const BenchmarkResult res = run_benchmark(data, std::span(&method, 1), wp.fps, horizons);
  if (!res.failures.empty()) {
    std::cerr << "evaluation failed: " << res.failures.front().second << '\n';
    return 2;
  }
  fs::create_directories(cfg.out_dir);
  std::ofstream(fs::path(cfg.out_dir) / "metrics.csv") << render_table_csv(res);
  std::ofstream(fs::path(cfg.out_dir) / "curve.csv") << render_curve_csv(res);
  std::cout << render_table(res);
  return 0;
}

std::vector<BenchmarkMethod> benchmark_methods(const RunConfig& cfg, const WindowParams& wp,
                                               const std::optional<Checkpoint>& ck,
                                               const std::vector<std::pair<std::string, fs::path>>& external) {
  std::vector<BenchmarkMethod> methods;
  if (ck) {
    BenchmarkMethod m;
    m.name = "trained";
    m.predict = [params = ck->params](const Sample& s, const AnchorScene&) { return predict(params, s); };
    methods.push_back(std::move(m));
  }
  {
    BenchmarkMethod m;
    m.name = "constant_velocity";
    m.predict = [fps = wp.fps](const Sample& s, const AnchorScene&) { return predict_constant_velocity(s, fps); };
    methods.push_back(std::move(m));
  }
  {
    BenchmarkMethod m;
    m.name = "rvo_rollout";
    m.predict = [fps = wp.fps, op = orca_params(cfg)](const Sample& s, const AnchorScene& scene) {
      return predict_rvo_rollout(s, scene, fps, op);
    };
    methods.push_back(std::move(m));
  }
  for (const auto& [name, path] : external) {
    BenchmarkMethod m;
    m.name = name;
    m.prediction_file = path;
    methods.push_back(std::move(m));
  }
  return methods;
}

BenchmarkResult bench_stage(const RunConfig& cfg, const fs::path& data_path, const std::optional<fs::path>& model_path,
                            const std::vector<std::pair<std::string, fs::path>>& external, const fs::path& out_dir) {
  WindowParams wp;
  const WindowedData data = read_samples(data_path, &wp);
  std::optional<Checkpoint> ck;
  if (model_path) ck = read_checkpoint(*model_path);
  const std::vector<BenchmarkMethod> methods = benchmark_methods(cfg, wp, ck, external);
  const BenchmarkResult res = run_benchmark(data, methods, wp.fps, horizons_for(wp.k));
  fs::create_directories(out_dir);
  std::ofstream(out_dir / "benchmark.txt") << render_table(res);
  std::ofstream(out_dir / "benchmark.csv") << render_table_csv(res);
  std::ofstream(out_dir / "curve.csv") << render_curve_csv(res);
  return res;
}

int run_bench(const RunConfig& cfg, const std::string& data_path, const std::string& model_path,
              const std::vector<std::string>& external_specs) {
  std::vector<std::pair<std::string, fs::path>> external;
  for (const std::string& spec : external_specs) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--pred expects name=path, got '" + spec + "'");
    external.emplace_back(spec.substr(0, eq), fs::path(spec.substr(eq + 1)));
  }
  std::optional<fs::path> model;
  if (!model_path.empty()) model = model_path;
  const BenchmarkResult res = bench_stage(cfg, data_path, model, external, cfg.out_dir);
  std::cout << render_table(res);
  return 0;
}

// ---------------------------------------------------------------------------
// synth

void synth_stage(const RunConfig& cfg, const fs::path& out_dir, std::ostream* progress) {
  const Homography camera = camera_for_arena(cfg.arena_width, cfg.arena_height, {cfg.pixel_width, cfg.pixel_height});
  for (int v = 0; v < cfg.n_videos; ++v) {
    const ScenarioSpec spec = scenario_spec(cfg, v);
    const Scenario scenario = generate_scenario(spec);
    const fs::path dir = out_dir / ("video_" + std::to_string(v));
    fs::create_directories(dir);
    write_trajectory_file(to_records(scenario.trajectories), dir / "truth.csv");
    write_class_sidecar(scenario.classes, dir / "classes.csv");
    write_homography(camera, dir / "homography.txt");
    for (std::size_t tier = 0; tier < cfg.sigma_tiers.size(); ++tier) {
      const double sigma = cfg.sigma_tiers[tier];
      const NoiseModel noise = noise_model(cfg, sigma, v, static_cast<int>(tier));
      const std::vector<Detection> dets =
          corrupt_detections(scenario.trajectories, scenario.classes, noise, camera, scaled_classes(cfg),
                             {cfg.pixel_width, cfg.pixel_height});
      write_detection_file(dets, dir / ("detections_" + sigma_label(sigma) + ".csv"));
    }
    if (progress != nullptr)
      (*progress) << "video " << v << ": " << cfg.n_agents << " agents, density "
                  << scenario_density_per_km(spec) << " agents/km\n";
  }
}

int run_synth(const RunConfig& cfg) {
  synth_stage(cfg, cfg.out_dir, &std::cout);
  std::printf("wrote %d videos under %s\n", cfg.n_videos, cfg.out_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// pipeline

std::string render_tier_grid(const std::vector<std::string>& tier_names,
                             const std::vector<BenchmarkResult>& tier_results) {
  // method -> per-tier "ADE/FDE" cells; methods in first-tier order.
  std::vector<std::string> methods;
  for (const BenchmarkResult& res : tier_results)
    for (const MetricsReport& r : res.reports)
      if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);

  std::vector<std::vector<std::string>> cells(methods.size(), std::vector<std::string>(tier_names.size(), "-"));
  for (std::size_t t = 0; t < tier_results.size(); ++t) {
    for (const MetricsReport& r : tier_results[t].reports) {
      const std::size_t m = static_cast<std::size_t>(
          std::find(methods.begin(), methods.end(), r.method) - methods.begin());
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.2f/%.2f", r.ade, r.fde);
      cells[m][t] = buf;
    }
  }

  std::size_t name_w = std::string("method").size();
  for (const std::string& m : methods) name_w = std::max(name_w, m.size());
  std::vector<std::size_t> col_w(tier_names.size());
  for (std::size_t t = 0; t < tier_names.size(); ++t) {
    col_w[t] = tier_names[t].size();
    for (std::size_t m = 0; m < methods.size(); ++m) col_w[t] = std::max(col_w[t], cells[m][t].size());
  }

  std::ostringstream out;
  out << "ADE/FDE (m) by method and noise tier\n";
  out << "method" << std::string(name_w - 6, ' ');
  for (std::size_t t = 0; t < tier_names.size(); ++t)
    out << "  " << tier_names[t] << std::string(col_w[t] - tier_names[t].size(), ' ');
  out << '\n';
  for (std::size_t m = 0; m < methods.size(); ++m) {
    out << methods[m] << std::string(name_w - methods[m].size(), ' ');
    for (std::size_t t = 0; t < tier_names.size(); ++t)
      out << "  " << cells[m][t] << std::string(col_w[t] - cells[m][t].size(), ' ');
    out << '\n';
  }
  return out.str();
}

int run_pipeline(const RunConfig& cfg) {
  if (cfg.n_videos < 2)
    throw ConfigError("scenario.n_videos must be at least 2 so the pipeline has a held-out test video");
  const fs::path out(cfg.out_dir);
  const fs::path videos_dir = out / "videos";

  const auto stage = [](const char* name, auto&& fn) {
    try {
      fn();
    } catch (...) {
      std::cerr << "pipeline aborted in stage '" << name << "'\n";
      throw;
    }
  };

  stage("synth", [&] { synth_stage(cfg, videos_dir, &std::cout); });

  std::vector<std::string> tier_names;
  std::vector<BenchmarkResult> tier_results;
  for (std::size_t tier = 0; tier < cfg.sigma_tiers.size(); ++tier) {
    const double sigma = cfg.sigma_tiers[tier];
    const std::string label = sigma_label(sigma);
    const fs::path tier_dir = out / "tiers" / label;
    std::cout << "tier " << label << '\n';

    stage("track", [&] {
      for (int v = 0; v < cfg.n_videos; ++v) {
        const fs::path video = videos_dir / ("video_" + std::to_string(v));
        run_track_stage(cfg, video / ("detections_" + label + ".csv"), video / "homography.txt",
                        tier_dir / ("video_" + std::to_string(v)));
      }
    });

    stage("dataset", [&] {
      std::vector<fs::path> traj, cls;
      for (int v = 0; v < cfg.n_videos; ++v) {
        traj.push_back(tier_dir / ("video_" + std::to_string(v)) / "trajectories.csv");
        cls.push_back(tier_dir / ("video_" + std::to_string(v)) / "track_classes.csv");
      }
      const DatasetCounts counts = make_dataset_stage(cfg, traj, cls, tier_dir);
      std::cout << "  samples train " << counts.train << " val " << counts.val << " test " << counts.test << '\n';
    });

    stage("train", [&] { train_stage(cfg, tier_dir / "train.bin", tier_dir / "val.bin", tier_dir, &std::cout); });

    stage("benchmark", [&] {
      tier_results.push_back(bench_stage(cfg, tier_dir / "test.bin", tier_dir / "model.ckpt", {}, tier_dir));
      tier_names.push_back(label);
      std::cout << render_table(tier_results.back());
    });
  }

  stage("report", [&] {
    std::ofstream report(out / "report.txt");
    if (!report) throw IoFailure("cannot write report");
    for (std::size_t t = 0; t < tier_names.size(); ++t)
      report << "noise tier " << tier_names[t] << "\n" << render_table(tier_results[t]) << '\n';
    report << render_tier_grid(tier_names, tier_results);
  });

  std::printf("wrote %s\n", (out / "report.txt").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajectory tracking and prediction pipeline"};
  app.require_subcommand(1);

  CommonOpts opts;

  std::string detections_path, homography_path;
  CLI::App* track = app.add_subcommand("track", "run the tracker over a detection file");
  add_common(track, opts, kCmdTrack);
  track->add_option("--detections", detections_path, "detection CSV")->required();
  track->add_option("--homography", homography_path, "pixel-to-world homography file")->required();

  std::vector<std::string> traj_files, class_files;
  CLI::App* dataset = app.add_subcommand("make-dataset", "window trajectory files into model samples");
  add_common(dataset, opts, kCmdDataset);
  dataset->add_option("--trajectories", traj_files, "trajectory CSVs, one per video")->required();
  dataset->add_option("--classes", class_files, "class sidecars, parallel to --trajectories");

  std::string train_path, val_path;
  CLI::App* train_cmd = app.add_subcommand("train", "fit the predictor on windowed samples");
  add_common(train_cmd, opts, kCmdTrain);
  train_cmd->add_option("--train", train_path, "training sample file")->required();
  train_cmd->add_option("--val", val_path, "validation sample file");

  std::string model_path, data_path;
  CLI::App* predict_cmd = app.add_subcommand("predict", "emit predictions for every sample");
  add_common(predict_cmd, opts, kCmdPredict);
  predict_cmd->add_option("--model", model_path, "checkpoint")->required();
  predict_cmd->add_option("--data", data_path, "sample file")->required();

  std::string eval_pred, eval_data;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score a prediction file against sample futures");
  add_common(eval_cmd, opts, kCmdEval);
  eval_cmd->add_option("--data", eval_data, "sample file")->required();
  eval_cmd->add_option("--pred", eval_pred, "prediction CSV")->required();

  std::string bench_data, bench_model;
  std::vector<std::string> bench_preds;
  CLI::App* bench_cmd = app.add_subcommand("bench", "compare prediction methods on one sample file");
  add_common(bench_cmd, opts, kCmdBench);
  bench_cmd->add_option("--data", bench_data, "sample file")->required();
  bench_cmd->add_option("--model", bench_model, "checkpoint for the trained method");
  bench_cmd->add_option("--pred", bench_preds, "external method as name=path, repeatable");

  CLI::App* synth_cmd = app.add_subcommand("synth", "generate synthetic videos with corrupted detections");
  add_common(synth_cmd, opts, kCmdSynth);

  CLI::App* pipeline_cmd = app.add_subcommand("pipeline", "synth, track, window, train, and benchmark end to end");
  add_common(pipeline_cmd, opts, kCmdPipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig cfg = resolve_config(opts);
    if (track->parsed()) return run_track(cfg, detections_path, homography_path);
    if (dataset->parsed()) return run_make_dataset(cfg, traj_files, class_files);
    if (train_cmd->parsed()) return run_train(cfg, train_path, val_path);
    if (predict_cmd->parsed()) return run_predict(cfg, model_path, data_path);
    if (eval_cmd->parsed()) return run_eval(cfg, eval_data, eval_pred);
    if (bench_cmd->parsed()) return run_bench(cfg, bench_data, bench_model, bench_preds);
    if (synth_cmd->parsed()) return run_synth(cfg);
    if (pipeline_cmd->parsed()) return run_pipeline(cfg);
    std::cerr << "no command given\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
