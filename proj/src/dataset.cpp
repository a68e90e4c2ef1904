// SPDX-License-Identifier: Apache-2.0
#include "trackpred/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <random>

#include "trackpred/errors.hpp"
#include "trackpred/state_space.hpp"

namespace trackpred {

namespace {

constexpr char kSampleMagic[8] = {'T', 'P', 'S', 'A', 'M', 'P', '0', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoFailure("unexpected end of sample file");
  return v;
}

void write_vec(std::ofstream& out, std::span<const double> v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_vec(std::ifstream& in, std::span<double> v) {
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!in) throw IoFailure("unexpected end of sample file");
}

struct AgentSegment {
  int agent_id;
  AgentClass cls;
  double radius;
  std::vector<TrajectoryPoint> points;  // consecutive frames
  int first_frame() const { return points.front().frame_id; }

  Vec2 velocity_at(std::size_t i, double fps) const {
    if (points.size() < 2) return {0.0, 0.0};
    if (i == 0) i = 1;
    return (points[i].position - points[i - 1].position) * fps;
  }
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

int WindowParams::history_len() const { return static_cast<int>(std::lround(tau * fps)); }
int WindowParams::future_len() const { return static_cast<int>(std::lround(k * fps)); }

std::vector<TrajectoryRecord> parse_trajectory_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open trajectory file: " + path.string());
  std::vector<TrajectoryRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) throw ParseError(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    try {
      records.push_back({std::stoi(fields[0]), std::stoi(fields[1]), std::stod(fields[2]), std::stod(fields[3])});
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return records;
}

void write_trajectory_file(std::span<const TrajectoryRecord> records, const std::filesystem::path& path) {
  std::vector<TrajectoryRecord> sorted(records.begin(), records.end());
  std::sort(sorted.begin(), sorted.end(), [](const TrajectoryRecord& a, const TrajectoryRecord& b) {
    return a.frame_id != b.frame_id ? a.frame_id < b.frame_id : a.vehicle_id < b.vehicle_id;
  });
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write trajectory file: " + path.string());
  char buf[96];
  for (const auto& r : sorted) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f\n", r.frame_id, r.vehicle_id, r.x, r.y);
    out << buf;
  }
  if (!out) throw IoFailure("failed writing trajectory file: " + path.string());
}

std::unordered_map<int, AgentClass> read_class_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open class file: " + path.string());
  std::unordered_map<int, AgentClass> classes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "vehicle_id,class") continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2) throw ParseError(line_no, "expected 2 fields, got " + std::to_string(fields.size()));
    try {
      const int id = std::stoi(fields[0]);
      if (!classes.emplace(id, parse_agent_class(fields[1])).second) {
        throw DuplicateId("duplicate vehicle id " + fields[0] + " in class file");
      }
    } catch (const DuplicateId&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return classes;
}

void write_class_sidecar(const std::unordered_map<int, AgentClass>& classes, const std::filesystem::path& path) {
  std::vector<std::pair<int, AgentClass>> rows(classes.begin(), classes.end());
  std::sort(rows.begin(), rows.end());
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write class file: " + path.string());
  out << "vehicle_id,class\n";
  for (const auto& [id, cls] : rows) out << id << ',' << to_string(cls) << '\n';
  if (!out) throw IoFailure("failed writing class file: " + path.string());
}

WorldPoint sample_to_world(const Sample& sample, Vec2 normalized) {
  return sample.anchor + rotated(normalized, sample.heading);
}

Vec2 sample_to_normalized(const Sample& sample, WorldPoint world) {
  return rotated(world - sample.anchor, -sample.heading);
}

std::vector<WorldPoint> future_world(const Sample& sample) {
  std::vector<WorldPoint> out;
  out.reserve(sample.future.size());
  for (const Vec2& q : sample.future) out.push_back(sample_to_world(sample, q));
  return out;
}

std::vector<WorldPoint> history_world(const Sample& sample) {
  std::vector<WorldPoint> out;
  out.reserve(sample.history.size());
  for (const Vec2& q : sample.history) out.push_back(sample_to_world(sample, q));
  return out;
}

std::vector<std::size_t> horizon_neighbors(std::span<const NeighborState> others, const NeighborState& ego,
                                           double heading, double fov, double range) {
  if (fov <= 0.0 || range <= 0.0) throw ConfigError("fov and range must be positive");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < others.size(); ++i) {
    if (others[i].id == ego.id) continue;
    const Vec2 rel = others[i].position - ego.position;
    const double d = norm(rel);
    if (d > range) continue;
    if (d <= 1e-12) {
      keep.push_back(i);  // co-located: bearing undefined, counts as visible
      continue;
    }
    const double bearing = wrap_angle(std::atan2(rel.y, rel.x) - heading);
    if (std::abs(bearing) <= fov / 2.0 + 1e-12) keep.push_back(i);
  }
  return keep;
}

void occupancy_grid(std::span<const NeighborState> neighbors, const NeighborState& ego, double heading,
                    const GridSpec& spec, const std::function<std::vector<double>(const NeighborState&)>& features_of,
                    std::span<double> out) {
  if (spec.rows < 1 || spec.cols < 1 || spec.features < 1 || spec.cell_long <= 0.0 || spec.cell_lat <= 0.0) {
    throw ConfigError("invalid grid spec");
  }
  if (out.size() != spec.size()) throw ShapeMismatch("grid buffer does not match the grid spec");

  const double half_long = spec.rows * spec.cell_long / 2.0;
  const double half_lat = spec.cols * spec.cell_lat / 2.0;
  for (const NeighborState& n : neighbors) {
    const Vec2 rel = rotated(n.position - ego.position, -heading);
    const double rx = rel.x + half_long;
    const double ry = rel.y + half_lat;
    if (rx < 0.0 || ry < 0.0) continue;
    const int row = static_cast<int>(std::floor(rx / spec.cell_long));
    const int col = static_cast<int>(std::floor(ry / spec.cell_lat));
    if (row < 0 || row >= spec.rows || col < 0 || col >= spec.cols) continue;
    const std::vector<double> f = features_of(n);
    if (f.size() != static_cast<std::size_t>(spec.features)) {
      throw ShapeMismatch("feature vector does not match the grid spec");
    }
    double* cell = out.data() + (static_cast<std::size_t>(row) * spec.cols + col) * spec.features;
    for (int k = 0; k < spec.features; ++k) cell[k] += f[static_cast<std::size_t>(k)];
  }
}

std::vector<double> heterogeneous_features(AgentClass cls, AgentSize size, Vec2 velocity, Vec2 prev_velocity,
                                           double fps) {
  std::vector<double> f(kHeterogeneousFeatures, 0.0);
  f[static_cast<std::size_t>(cls)] = 1.0;
  f[kNumAgentClasses] = size.length;
  f[kNumAgentClasses + 1] = size.width;
  const double speed = norm(velocity);
  f[kNumAgentClasses + 2] = speed;
  const double prev_speed = norm(prev_velocity);
  if (speed > 1e-9 && prev_speed > 1e-9) {
    const double dh = wrap_angle(std::atan2(velocity.y, velocity.x) - std::atan2(prev_velocity.y, prev_velocity.x));
    f[kNumAgentClasses + 3] = dh * fps;
  }
  return f;
}

WindowedData window_samples(std::span<const TrajectoryRecord> records, const WindowParams& params,
                            const std::unordered_map<int, AgentClass>& classes, int source_id) {
  const int hist = params.history_len();
  const int fut = params.future_len();
  if (params.fps <= 0.0) throw ConfigError("fps must be positive");
  if (hist < 2) throw ConfigError("tau*fps must be at least 2 frames");
  if (fut < 1) throw ConfigError("k*fps must be at least 1 frame");
  if (params.stride < 1) throw ConfigError("stride must be >= 1");
  if (params.grid.features != kHeterogeneousFeatures) {
    throw ConfigError("grid feature count must match the heterogeneous feature length");
  }

  // Group into per-agent trajectories, repair small gaps, split large ones.
  std::map<int, Trajectory> by_agent;
  for (const TrajectoryRecord& r : records) {
    Trajectory& t = by_agent[r.vehicle_id];
    t.agent_id = r.vehicle_id;
    t.points.push_back({r.frame_id, {r.x, r.y}});
  }
  std::vector<AgentSegment> segments;
  for (auto& [id, traj] : by_agent) {
    std::sort(traj.points.begin(), traj.points.end(),
              [](const TrajectoryPoint& a, const TrajectoryPoint& b) { return a.frame_id < b.frame_id; });
    for (std::size_t i = 1; i < traj.points.size(); ++i) {
      if (traj.points[i].frame_id == traj.points[i - 1].frame_id) {
        throw DuplicateId("duplicate (frame, vehicle) pair for vehicle " + std::to_string(id));
      }
    }
    AgentClass cls = AgentClass::Other;
    if (const auto it = classes.find(id); it != classes.end()) cls = it->second;
    for (Trajectory& seg : repair_gaps(traj, params.max_gap)) {
      segments.push_back({id, cls, disc_radius(params.classes.size_of(cls)), std::move(seg.points)});
    }
  }

  // Per-frame index of segment states, for anchor scenes.
  std::unordered_map<int, std::vector<std::pair<std::size_t, std::size_t>>> frame_index;  // frame -> (segment, local)
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (std::size_t i = 0; i < segments[s].points.size(); ++i) {
      frame_index[segments[s].points[i].frame_id].emplace_back(s, i);
    }
  }

  auto state_at = [&](const AgentSegment& seg, std::size_t i) {
    NeighborState n;
    n.id = seg.agent_id;
    n.cls = seg.cls;
    n.radius = seg.radius;
    n.position = seg.points[i].position;
    n.velocity = seg.velocity_at(i, params.fps);
    n.prev_velocity = i >= 2 ? seg.velocity_at(i - 1, params.fps) : n.velocity;
    return n;
  };

  const int heading_window = std::max(1, static_cast<int>(std::lround(0.5 * params.fps)));

  WindowedData data;
  for (const AgentSegment& seg : segments) {
    const int len = static_cast<int>(seg.points.size());
    for (int a = hist - 1; a + fut < len; a += params.stride) {
      const auto ai = static_cast<std::size_t>(a);
      const WorldPoint anchor = seg.points[ai].position;
      const int back = std::min(heading_window, a);
      const Vec2 recent = anchor - seg.points[static_cast<std::size_t>(a - back)].position;
      const double heading = norm(recent) > 1e-9 ? std::atan2(recent.y, recent.x) : 0.0;

      Sample sample;
      sample.source_id = source_id;
      sample.ego_id = seg.agent_id;
      sample.ego_class = seg.cls;
      sample.anchor_frame = seg.points[ai].frame_id;
      sample.anchor = anchor;
      sample.heading = heading;
      sample.history.reserve(static_cast<std::size_t>(hist));
      for (int i = a - hist + 1; i <= a; ++i) {
        sample.history.push_back(rotated(seg.points[static_cast<std::size_t>(i)].position - anchor, -heading));
      }
      sample.future.reserve(static_cast<std::size_t>(fut));
      for (int i = a + 1; i <= a + fut; ++i) {
        sample.future.push_back(rotated(seg.points[static_cast<std::size_t>(i)].position - anchor, -heading));
      }

      AnchorScene scene;
      scene.ego = state_at(seg, ai);
      if (const auto it = frame_index.find(sample.anchor_frame); it != frame_index.end()) {
        for (const auto& [s2, i2] : it->second) {
          if (segments[s2].agent_id == seg.agent_id) continue;
          scene.neighbors.push_back(state_at(segments[s2], i2));
        }
      }
      std::sort(scene.neighbors.begin(), scene.neighbors.end(),
                [](const NeighborState& x, const NeighborState& y) { return x.id < y.id; });

      auto features = [&params](const NeighborState& n) {
        return heterogeneous_features(n.cls, params.classes.size_of(n.cls), n.velocity, n.prev_velocity, params.fps);
      };

      sample.horizon_grid.assign(params.grid.size(), 0.0);
      std::vector<NeighborState> visible;
      for (std::size_t idx :
           horizon_neighbors(scene.neighbors, scene.ego, heading, params.horizon_fov, params.horizon_range)) {
        visible.push_back(scene.neighbors[idx]);
      }
      occupancy_grid(visible, scene.ego, heading, params.grid, features, sample.horizon_grid);

      sample.neighbor_grid.assign(params.grid.size(), 0.0);
      visible.clear();
      for (std::size_t idx :
           horizon_neighbors(scene.neighbors, scene.ego, heading, params.neighbor_fov, params.neighbor_range)) {
        visible.push_back(scene.neighbors[idx]);
      }
      occupancy_grid(visible, scene.ego, heading, params.grid, features, sample.neighbor_grid);

      data.samples.push_back(std::move(sample));
      data.scenes.push_back(std::move(scene));
    }
  }
  return data;
}

void write_samples(const std::filesystem::path& path, const WindowedData& data, const WindowParams& params) {
  if (data.samples.size() != data.scenes.size()) throw LengthMismatch("samples and scenes must be parallel");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write sample file: " + path.string());
  out.write(kSampleMagic, sizeof(kSampleMagic));
  write_pod(out, params.tau);
  write_pod(out, params.k);
  write_pod(out, params.fps);
  write_pod(out, static_cast<std::int32_t>(params.stride));
  write_pod(out, static_cast<std::int32_t>(params.grid.rows));
  write_pod(out, static_cast<std::int32_t>(params.grid.cols));
  write_pod(out, params.grid.cell_long);
  write_pod(out, params.grid.cell_lat);
  write_pod(out, static_cast<std::int32_t>(params.grid.features));
  write_pod(out, params.horizon_fov);
  write_pod(out, params.horizon_range);
  write_pod(out, params.neighbor_fov);
  write_pod(out, params.neighbor_range);
  write_pod(out, static_cast<std::int32_t>(params.max_gap));
  write_pod(out, static_cast<std::uint64_t>(data.samples.size()));

  auto write_state = [&out](const NeighborState& n) {
    write_pod(out, static_cast<std::int32_t>(n.id));
    write_pod(out, static_cast<std::uint8_t>(n.cls));
    write_pod(out, n.position.x);
    write_pod(out, n.position.y);
    write_pod(out, n.velocity.x);
    write_pod(out, n.velocity.y);
    write_pod(out, n.prev_velocity.x);
    write_pod(out, n.prev_velocity.y);
    write_pod(out, n.radius);
  };

  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& s = data.samples[i];
    const AnchorScene& scene = data.scenes[i];
    write_pod(out, static_cast<std::int32_t>(s.source_id));
    write_pod(out, static_cast<std::int32_t>(s.ego_id));
    write_pod(out, static_cast<std::int32_t>(s.anchor_frame));
    write_pod(out, static_cast<std::uint8_t>(s.ego_class));
    write_pod(out, s.anchor.x);
    write_pod(out, s.anchor.y);
    write_pod(out, s.heading);
    write_pod(out, static_cast<std::uint32_t>(s.history.size()));
    for (const Vec2& p : s.history) {
      write_pod(out, p.x);
      write_pod(out, p.y);
    }
    write_pod(out, static_cast<std::uint32_t>(s.future.size()));
    for (const Vec2& p : s.future) {
      write_pod(out, p.x);
      write_pod(out, p.y);
    }
    write_pod(out, static_cast<std::uint64_t>(s.horizon_grid.size()));
    write_vec(out, s.horizon_grid);
    if (s.neighbor_grid.size() != s.horizon_grid.size()) throw ShapeMismatch("grids differ in size");
    write_vec(out, s.neighbor_grid);
    write_state(scene.ego);
    write_pod(out, static_cast<std::uint32_t>(scene.neighbors.size()));
    for (const NeighborState& n : scene.neighbors) write_state(n);
  }
  if (!out) throw IoFailure("failed writing sample file: " + path.string());
}

WindowedData read_samples(const std::filesystem::path& path, WindowParams* params_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open sample file: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kSampleMagic, sizeof(magic)) != 0) {
    throw ParseError(1, "not a sample file (bad magic): " + path.string());
  }
  WindowParams params;
  params.tau = read_pod<double>(in);
  params.k = read_pod<double>(in);
  params.fps = read_pod<double>(in);
  params.stride = read_pod<std::int32_t>(in);
  params.grid.rows = read_pod<std::int32_t>(in);
  params.grid.cols = read_pod<std::int32_t>(in);
  params.grid.cell_long = read_pod<double>(in);
  params.grid.cell_lat = read_pod<double>(in);
  params.grid.features = read_pod<std::int32_t>(in);
  params.horizon_fov = read_pod<double>(in);
  params.horizon_range = read_pod<double>(in);
  params.neighbor_fov = read_pod<double>(in);
  params.neighbor_range = read_pod<double>(in);
  params.max_gap = read_pod<std::int32_t>(in);
  const auto n = read_pod<std::uint64_t>(in);

  auto read_state = [&in]() {
    NeighborState s;
    s.id = read_pod<std::int32_t>(in);
    s.cls = static_cast<AgentClass>(read_pod<std::uint8_t>(in));
    s.position.x = read_pod<double>(in);
    s.position.y = read_pod<double>(in);
    s.velocity.x = read_pod<double>(in);
    s.velocity.y = read_pod<double>(in);
    s.prev_velocity.x = read_pod<double>(in);
    s.prev_velocity.y = read_pod<double>(in);
    s.radius = read_pod<double>(in);
    return s;
  };

  WindowedData data;
  data.samples.reserve(n);
  data.scenes.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Sample s;
    s.source_id = read_pod<std::int32_t>(in);
    s.ego_id = read_pod<std::int32_t>(in);
    s.anchor_frame = read_pod<std::int32_t>(in);
    s.ego_class = static_cast<AgentClass>(read_pod<std::uint8_t>(in));
    s.anchor.x = read_pod<double>(in);
    s.anchor.y = read_pod<double>(in);
    s.heading = read_pod<double>(in);
    const auto hn = read_pod<std::uint32_t>(in);
    s.history.resize(hn);
    for (Vec2& p : s.history) {
      p.x = read_pod<double>(in);
      p.y = read_pod<double>(in);
    }
    const auto fn = read_pod<std::uint32_t>(in);
    s.future.resize(fn);
    for (Vec2& p : s.future) {
      p.x = read_pod<double>(in);
      p.y = read_pod<double>(in);
    }
    const auto gn = read_pod<std::uint64_t>(in);
    s.horizon_grid.resize(gn);
    read_vec(in, s.horizon_grid);
    s.neighbor_grid.resize(gn);
    read_vec(in, s.neighbor_grid);
    AnchorScene scene;
    scene.ego = read_state();
    const auto nn = read_pod<std::uint32_t>(in);
    scene.neighbors.reserve(nn);
    for (std::uint32_t j = 0; j < nn; ++j) scene.neighbors.push_back(read_state());
    data.samples.push_back(std::move(s));
    data.scenes.push_back(std::move(scene));
  }
  if (params_out != nullptr) *params_out = params;
  return data;
}

SplitIndices split_by_source(int n_sources, std::uint64_t seed) {
  SplitIndices split;
  if (n_sources <= 0) return split;
  std::vector<int> ids(static_cast<std::size_t>(n_sources));
  for (int i = 0; i < n_sources; ++i) ids[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);

  const int n_test = n_sources >= 2 ? std::max(1, static_cast<int>(std::floor(0.2 * n_sources))) : 0;
  const int n_val = n_sources >= 3 ? std::max(1, static_cast<int>(std::floor(0.1 * n_sources))) : 0;
  const int n_train = n_sources - n_test - n_val;

  split.train.assign(ids.begin(), ids.begin() + n_train);
  split.val.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
  split.test.assign(ids.begin() + n_train + n_val, ids.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace trackpred
