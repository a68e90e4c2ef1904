// SPDX-License-Identifier: Apache-2.0
#include "trackpred/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "trackpred/errors.hpp"

namespace trackpred {

namespace {

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ShapeMismatch("appearance vectors differ in length");
  double num = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return num / (std::sqrt(na) * std::sqrt(nb));
}

PixelBox recentered(const PixelBox& box, PixelPoint center) {
  return {center.u - box[2] / 2.0, center.v - box[3] / 2.0, box[2], box[3]};
}

AgentDisc track_disc(const Track& t, const TrackerConfig& cfg) {
  AgentDisc d;
  d.id = t.id;
  d.position = t.position;
  d.velocity = t.velocity;
  d.radius = disc_radius(cfg.classes.size_of(t.cls));
  const double speed = norm(t.velocity);
  d.pref_speed = speed;
  // Never clamp the observed motion; the class cap only bounds the avoidance response.
  d.max_speed = std::max(cfg.classes.max_speed_of(t.cls), 1.2 * speed);
  if (d.max_speed <= 0.0) d.max_speed = 1.0;
  d.goal = t.position + t.velocity * cfg.orca.time_horizon;
  return d;
}

}  // namespace

Detection make_detection(int frame_id, double x, double y, double w, double h, AgentClass cls, double confidence) {
  if (w <= 0.0 || h <= 0.0) throw Error("detection bbox must have positive size");
  if (confidence < 0.0 || confidence > 1.0) throw Error("detection confidence must be in [0, 1]");
  Detection d;
  d.frame_id = frame_id;
  d.bbox = {x, y, w, h};
  d.scale = w * h;
  d.aspect = w / h;
  d.cls = cls;
  d.confidence = confidence;
  return d;
}

SegmentedPatch masked_representation(const Detection& d) {
  if (!d.mask.has_value()) throw MissingMask("detection has no segmentation mask");
  const BoolMask& m = *d.mask;
  const int bw = static_cast<int>(std::lround(d.bbox[2]));
  const int bh = static_cast<int>(std::lround(d.bbox[3]));
  if (m.w != bw || m.h != bh) throw ShapeMismatch("mask dimensions do not match the bbox");
  if (m.data.size() != static_cast<std::size_t>(m.w) * static_cast<std::size_t>(m.h)) {
    throw ShapeMismatch("mask buffer does not match its dimensions");
  }
  int count = 0;
  for (std::uint8_t px : m.data) count += px != 0 ? 1 : 0;
  if (count == 0) throw Error("segmentation mask selects no pixels");
  return {d.bbox, m, count};
}

WorldPoint detection_center_world(const Detection& d, const Homography& pixel_to_world) {
  return project_to_world(pixel_to_world, {d.bbox[0] + d.bbox[2] / 2.0, d.bbox[1] + d.bbox[3] / 2.0});
}

double iou(const PixelBox& a, const PixelBox& b) {
  const double ix = std::max(0.0, std::min(a[0] + a[2], b[0] + b[2]) - std::max(a[0], b[0]));
  const double iy = std::max(0.0, std::min(a[1] + a[3], b[1] + b[3]) - std::max(a[1], b[1]));
  const double inter = ix * iy;
  const double uni = a[2] * a[3] + b[2] * b[3] - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

CostMatrix association_cost(std::span<const Track> predicted, std::span<const Detection> dets,
                            const TrackerConfig& cfg, const Homography& world_to_pixel) {
  CostMatrix cost(predicted.size(), dets.size());
  std::vector<WorldPoint> det_world(dets.size());
  for (std::size_t j = 0; j < dets.size(); ++j) det_world[j] = detection_center_world(dets[j], cfg.pixel_to_world);

  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const Track& t = predicted[i];
    const PixelBox pred_box = recentered(t.last_bbox, project_to_pixel(world_to_pixel, t.position));
    for (std::size_t j = 0; j < dets.size(); ++j) {
      const Detection& d = dets[j];
      if (d.cls != t.cls) {
        cost.at(i, j) = kForbidden;
        continue;
      }
      const double dist = distance(t.position, det_world[j]);
      if (dist > cfg.gate_distance) {
        cost.at(i, j) = kForbidden;
        continue;
      }
      const bool has_app =
          cfg.w_app > 0.0 && t.appearance.has_value() && d.appearance.has_value() &&
          !t.appearance->empty() && !d.appearance->empty();
      double w_dist = cfg.w_dist, w_iou = cfg.w_iou, w_app = cfg.w_app;
      if (!has_app) {
        const double s = w_dist + w_iou;
        if (s <= 0.0) throw ConfigError("association weights must not all be zero");
        w_dist /= s;
        w_iou /= s;
        w_app = 0.0;
      }
      double c = w_dist * (dist / cfg.gate_distance) + w_iou * (1.0 - iou(pred_box, d.bbox));
      if (has_app) c += w_app * (1.0 - cosine_similarity(*t.appearance, *d.appearance));
      cost.at(i, j) = c;
    }
  }
  return cost;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)), world_to_pixel_(cfg_.pixel_to_world.inverse()) {
  if (cfg_.fps <= 0.0) throw ConfigError("tracker fps must be positive");
  if (cfg_.confirm_hits < 1) throw ConfigError("confirm_hits must be >= 1");
  if (cfg_.max_misses < 0) throw ConfigError("max_misses must be >= 0");
  if (cfg_.gate_distance <= 0.0) throw ConfigError("gate_distance must be positive");
  if (cfg_.alpha < 0.0 || cfg_.alpha > 1.0) throw ConfigError("blend alpha must be in [0, 1]");
}

void Tracker::begin_frame(int frame_id, std::span<const Detection>& dets) {
  if (expected_frame_.has_value() && frame_id != *expected_frame_) {
    throw FrameOutOfOrder("expected frame " + std::to_string(*expected_frame_) + ", got " +
                          std::to_string(frame_id));
  }
  for (const Detection& d : dets) {
    if (d.frame_id != frame_id) throw Error("detections disagree on their frame id");
  }
  expected_frame_ = frame_id + 1;
  ++frames_processed_;
}

void Tracker::process_frame(int frame_id, std::span<const Detection> dets) {
  begin_frame(frame_id, dets);

  std::vector<Detection> usable;
  usable.reserve(dets.size());
  for (const Detection& d : dets) {
    if (d.confidence >= cfg_.min_confidence) usable.push_back(d);
  }

  // Advance every live track by the interaction-aware prior, against a
  // snapshot of the other live tracks.
  const double dt = 1.0 / cfg_.fps;
  std::vector<AgentDisc> discs;
  discs.reserve(live_.size());
  for (const Track& t : live_) discs.push_back(track_disc(t, cfg_));
  std::vector<WorldPoint> prev_pos(live_.size());
  for (std::size_t i = 0; i < live_.size(); ++i) {
    prev_pos[i] = live_[i].position;
    const auto [p, v] = predict_next_state(discs[i], discs, dt, cfg_.orca);
    live_[i].position = p;
    live_[i].velocity = v;
  }

  const CostMatrix cost = association_cost(live_, usable, cfg_, world_to_pixel_);
  const Assignment result = assign(cost);

  std::vector<char> det_used(usable.size(), 0);
  std::vector<char> track_matched(live_.size(), 0);
  for (const auto& [ti, dj] : result.matches) {
    const auto i = static_cast<std::size_t>(ti);
    const auto j = static_cast<std::size_t>(dj);
    Track& t = live_[i];
    const Detection& d = usable[j];
    const WorldPoint meas_pos = detection_center_world(d, cfg_.pixel_to_world);
    const Vec2 meas_vel = (meas_pos - prev_pos[i]) * cfg_.fps;
    const double a = cfg_.alpha;
    t.position = {a * meas_pos.x + (1.0 - a) * t.position.x, a * meas_pos.y + (1.0 - a) * t.position.y};
    t.velocity = a * meas_vel + (1.0 - a) * t.velocity;
    t.hits += 1;
    t.time_since_update = 0;
    t.last_bbox = d.bbox;
    if (d.appearance.has_value()) t.appearance = d.appearance;
    t.history.push_back({frame_id, t.position});
    if (t.status == TrackStatus::Tentative && t.hits >= cfg_.confirm_hits) t.status = TrackStatus::Confirmed;
    track_matched[i] = 1;
    det_used[j] = 1;
  }

  std::vector<Track> survivors;
  survivors.reserve(live_.size() + usable.size());
  for (std::size_t i = 0; i < live_.size(); ++i) {
    Track& t = live_[i];
    if (track_matched[i]) {
      survivors.push_back(std::move(t));
      continue;
    }
    t.time_since_update += 1;
    if (t.status == TrackStatus::Tentative) {
      // A miss breaks the consecutive-detection requirement: drop immediately.
      t.status = TrackStatus::Deleted;
      continue;
    }
    if (t.time_since_update > cfg_.max_misses) {
      t.status = TrackStatus::Deleted;
      finished_.push_back(std::move(t));
      continue;
    }
    survivors.push_back(std::move(t));
  }

  for (std::size_t j = 0; j < usable.size(); ++j) {
    if (det_used[j]) continue;
    const Detection& d = usable[j];
    Track t;
    t.id = next_id_++;
    t.cls = d.cls;
    t.status = cfg_.confirm_hits <= 1 ? TrackStatus::Confirmed : TrackStatus::Tentative;
    t.position = detection_center_world(d, cfg_.pixel_to_world);
    t.velocity = {0.0, 0.0};
    t.hits = 1;
    t.last_bbox = d.bbox;
    if (d.appearance.has_value()) t.appearance = d.appearance;
    t.history.push_back({frame_id, t.position});
    survivors.push_back(std::move(t));
  }

  live_ = std::move(survivors);
}

std::vector<Track> Tracker::confirmed_tracks() const {
  std::vector<Track> out;
  for (const Track& t : finished_) out.push_back(t);
  for (const Track& t : live_) {
    if (t.status == TrackStatus::Confirmed) out.push_back(t);
  }
  std::sort(out.begin(), out.end(), [](const Track& a, const Track& b) { return a.id < b.id; });
  return out;
}

void export_trajectories(std::span<const Track> tracks, const std::filesystem::path& path) {
  struct Line {
    int frame;
    int id;
    WorldPoint p;
  };
  std::vector<Line> lines;
  for (const Track& t : tracks) {
    if (t.status == TrackStatus::Tentative) continue;
    for (const auto& h : t.history) lines.push_back({h.frame_id, t.id, h.position});
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });

  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write trajectory file: " + path.string());
  char buf[96];
  for (const Line& l : lines) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f\n", l.frame, l.id, l.p.x, l.p.y);
    out << buf;
  }
  if (!out) throw IoFailure("failed writing trajectory file: " + path.string());
}

void export_track_classes(std::span<const Track> tracks, const std::filesystem::path& path) {
  std::vector<std::pair<int, AgentClass>> rows;
  for (const Track& t : tracks) {
    if (t.status == TrackStatus::Tentative) continue;
    rows.emplace_back(t.id, t.cls);
  }
  std::sort(rows.begin(), rows.end());
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write class file: " + path.string());
  out << "vehicle_id,class\n";
  for (const auto& [id, cls] : rows) out << id << ',' << to_string(cls) << '\n';
  if (!out) throw IoFailure("failed writing class file: " + path.string());
}

std::vector<Detection> read_detection_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open detections file: " + path.string());

  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) return {};  // no rows at all: an empty stream
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  constexpr std::string_view kPrefix = "frame_id,x,y,w,h,class,confidence";
  if (line.substr(0, kPrefix.size()) != kPrefix) {
    throw ParseError(line_no, "unexpected detections header '" + line + "'");
  }
  std::size_t app_dim = 0;
  if (line.size() > kPrefix.size()) {
    std::string rest = line.substr(kPrefix.size());
    std::size_t expect = 0;
    while (!rest.empty()) {
      const std::string want = ",app_" + std::to_string(expect);
      if (rest.substr(0, want.size()) != want) throw ParseError(line_no, "unexpected detections header column");
      rest = rest.substr(want.size());
      ++expect;
    }
    app_dim = expect;
  }

  std::vector<Detection> dets;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7 + app_dim) {
      throw ParseError(line_no, "expected " + std::to_string(7 + app_dim) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    try {
      const int frame = std::stoi(fields[0]);
      const double x = std::stod(fields[1]);
      const double y = std::stod(fields[2]);
      const double w = std::stod(fields[3]);
      const double h = std::stod(fields[4]);
      const AgentClass cls = parse_agent_class(fields[5]);
      const double conf = std::stod(fields[6]);
      Detection d = make_detection(frame, x, y, w, h, cls, conf);
      if (app_dim > 0) {
        std::vector<double> app(app_dim);
        for (std::size_t k = 0; k < app_dim; ++k) app[k] = std::stod(fields[7 + k]);
        d.appearance = std::move(app);
      }
      dets.push_back(std::move(d));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return dets;
}

void write_detection_file(std::span<const Detection> dets, const std::filesystem::path& path) {
  std::size_t app_dim = 0;
  for (const Detection& d : dets) {
    if (d.appearance.has_value()) {
      if (app_dim == 0) {
        app_dim = d.appearance->size();
      } else if (d.appearance->size() != app_dim) {
        throw LengthMismatch("detections disagree on appearance dimension");
      }
    }
  }
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write detections file: " + path.string());
  out << "frame_id,x,y,w,h,class,confidence";
  for (std::size_t k = 0; k < app_dim; ++k) out << ",app_" << k;
  out << '\n';
  char buf[160];
  for (const Detection& d : dets) {
    if (app_dim > 0 && !d.appearance.has_value()) {
      throw LengthMismatch("detections disagree on appearance dimension");
    }
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%s,%.6f", d.frame_id, d.bbox[0], d.bbox[1], d.bbox[2],
                  d.bbox[3], std::string(to_string(d.cls)).c_str(), d.confidence);
    out << buf;
    if (app_dim > 0) {
      for (double a : *d.appearance) {
        std::snprintf(buf, sizeof(buf), ",%.6f", a);
        out << buf;
      }
    }
    out << '\n';
  }
  if (!out) throw IoFailure("failed writing detections file: " + path.string());
}

}  // namespace trackpred
