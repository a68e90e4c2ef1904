// SPDX-License-Identifier: Apache-2.0
// Assignment is checked against full permutation enumeration, association
// costs against term-by-term hand computation, and the tracker lifecycle
// against a seeded multi-agent scene with known identities.
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "trackpred/assignment.hpp"
#include "trackpred/dataset.hpp"
#include "trackpred/errors.hpp"
#include "trackpred/tracker.hpp"

using namespace trackpred;

namespace {

// Exhaustive minimum over all injective row -> col maps, maximizing match
// count first. Small sizes only.
struct BruteResult {
  int max_matches = 0;
  double min_cost = 0.0;
};

void brute_recurse(const CostMatrix& m, std::size_t row, std::vector<bool>& used, int matches, double cost,
                   BruteResult& best) {
  if (row == m.rows) {
    if (matches > best.max_matches || (matches == best.max_matches && cost < best.min_cost)) {
      best.max_matches = matches;
      best.min_cost = cost;
    }
    return;
  }
  brute_recurse(m, row + 1, used, matches, cost, best);  // row unmatched
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (used[c] || m.at(row, c) == kForbidden) continue;
    used[c] = true;
    brute_recurse(m, row + 1, used, matches + 1, cost + m.at(row, c), best);
    used[c] = false;
  }
}

BruteResult brute_force(const CostMatrix& m) {
  BruteResult best;
  best.max_matches = -1;
  std::vector<bool> used(m.cols, false);
  brute_recurse(m, 0, used, 0, 0.0, best);
  return best;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

Detection world_detection(int frame, WorldPoint w, const Homography& world_to_pixel, AgentClass cls,
                          double box = 20.0) {
  const PixelPoint p = project_to_pixel(world_to_pixel, w);
  return make_detection(frame, p.u - box / 2.0, p.v - box / 2.0, box, box, cls, 0.9);
}

}  // namespace

TEST_SUITE("tracker") {

TEST_CASE("masked representation") {
  Detection d = make_detection(0, 10, 20, 4, 3, AgentClass::Car, 0.9);
  CHECK_THROWS_AS(masked_representation(d), MissingMask);

  BoolMask all_true{4, 3, std::vector<std::uint8_t>(12, 1)};
  d.mask = all_true;
  const SegmentedPatch patch = masked_representation(d);
  CHECK(patch.pixel_count == 12);

  BoolMask wrong{3, 3, std::vector<std::uint8_t>(9, 1)};
  d.mask = wrong;
  CHECK_THROWS_AS(masked_representation(d), ShapeMismatch);

  BoolMask none{4, 3, std::vector<std::uint8_t>(12, 0)};
  d.mask = none;
  CHECK_THROWS_AS(masked_representation(d), Error);

  // Arbitrary mask: selected count equals the mask popcount.
  BoolMask some{4, 3, std::vector<std::uint8_t>{1, 0, 1, 0, 0, 1, 0, 0, 1, 1, 0, 1}};
  d.mask = some;
  CHECK(masked_representation(d).pixel_count == 6);
}

TEST_CASE("detection center projection") {
  const Detection d = make_detection(0, 0, 0, 10, 20, AgentClass::Car, 1.0);
  const WorldPoint c = detection_center_world(d, Homography::identity());
  CHECK(c.x == doctest::Approx(5.0));
  CHECK(c.y == doctest::Approx(10.0));

  Homography scale;
  scale.at(0, 0) = 2.0;
  scale.at(1, 1) = 2.0;
  const WorldPoint c2 = detection_center_world(d, scale);
  CHECK(c2.x == doctest::Approx(10.0));
  CHECK(c2.y == doctest::Approx(20.0));
}

TEST_CASE("iou basics") {
  const PixelBox a{0, 0, 10, 10};
  CHECK(iou(a, a) == doctest::Approx(1.0));
  CHECK(iou(a, {20, 20, 5, 5}) == doctest::Approx(0.0));
  CHECK(iou(a, {5, 0, 10, 10}) == doctest::Approx(50.0 / 150.0));
}

TEST_CASE("assignment on diagonal-dominant matrix picks the diagonal") {
  CostMatrix m(3, 3, 10.0);
  for (std::size_t i = 0; i < 3; ++i) m.at(i, i) = 0.0;
  const Assignment a = assign(m);
  REQUIRE(a.matches.size() == 3);
  for (const auto& [r, c] : a.matches) CHECK(r == c);
  CHECK(a.total_cost == doctest::Approx(0.0));
}

TEST_CASE("assignment equals brute force on random matrices") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_int_distribution<int> size_dist(1, 5);
  std::uniform_real_distribution<double> forbid(0.0, 1.0);

  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = static_cast<std::size_t>(size_dist(rng));
    const std::size_t cols = static_cast<std::size_t>(size_dist(rng));
    CostMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = forbid(rng) < 0.2 ? kForbidden : u(rng);

    const Assignment got = assign(m);
    const BruteResult want = brute_force(m);
    CHECK(static_cast<int>(got.matches.size()) == want.max_matches);
    CHECK(got.total_cost == doctest::Approx(want.min_cost).epsilon(1e-9));

    // Matches must be injective and avoid forbidden cells.
    std::vector<bool> row_used(rows, false), col_used(cols, false);
    double cost = 0.0;
    for (const auto& [r, c] : got.matches) {
      CHECK_FALSE(row_used[static_cast<std::size_t>(r)]);
      CHECK_FALSE(col_used[static_cast<std::size_t>(c)]);
      row_used[static_cast<std::size_t>(r)] = true;
      col_used[static_cast<std::size_t>(c)] = true;
      CHECK(m.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) != kForbidden);
      cost += m.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
    CHECK(cost == doctest::Approx(got.total_cost).epsilon(1e-9));
    CHECK(got.matches.size() + got.unmatched_rows.size() == rows);
    CHECK(got.matches.size() + got.unmatched_cols.size() == cols);
  }
}

TEST_CASE("assignment leaves an all-forbidden row unmatched") {
  CostMatrix m(2, 3, 1.0);
  for (std::size_t c = 0; c < 3; ++c) m.at(0, c) = kForbidden;
  const Assignment a = assign(m);
  REQUIRE(a.matches.size() == 1);
  CHECK(a.matches[0].first == 1);
  REQUIRE(a.unmatched_rows.size() == 1);
  CHECK(a.unmatched_rows[0] == 0);
}

TEST_CASE("assignment rejects NaN costs") {
  CostMatrix m(1, 1, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(assign(m), Error);
}

TEST_CASE("association cost matches hand computation") {
  TrackerConfig cfg;
  cfg.pixel_to_world = Homography::identity();
  cfg.w_dist = 0.6;
  cfg.w_iou = 0.4;
  cfg.w_app = 0.0;
  cfg.gate_distance = 4.0;

  // Track exactly atop its detection, same class: distance 0, iou 1.
  Track t;
  t.id = 1;
  t.cls = AgentClass::Car;
  t.position = {5.0, 5.0};
  t.last_bbox = {0.0, 0.0, 10.0, 10.0};

  std::vector<Detection> dets = {make_detection(0, 0, 0, 10, 10, AgentClass::Car, 1.0),
                                 make_detection(0, 1, 0, 10, 10, AgentClass::Car, 1.0),
                                 make_detection(0, 0, 0, 10, 10, AgentClass::Bus, 1.0)};

  const CostMatrix m = association_cost(std::span(&t, 1), dets, cfg, Homography::identity());
  REQUIRE(m.rows == 1);
  REQUIRE(m.cols == 3);

  // d0: same center and box: cost = 0.6*(0/4) + 0.4*(1 - 1) = 0.
  CHECK(m.at(0, 0) == doctest::Approx(0.0));
  // d1: center (6, 5), distance 1, iou = 9x10 / (2*100 - 90).
  const double want = 0.6 * (1.0 / 4.0) + 0.4 * (1.0 - 90.0 / 110.0);
  CHECK(m.at(0, 1) == doctest::Approx(want).epsilon(1e-12));
  // d2: class mismatch is gated out entirely.
  CHECK(m.at(0, 2) == kForbidden);

  // Beyond the gate distance the pair is forbidden too.
  std::vector<Detection> far = {make_detection(0, 10, 5, 10, 10, AgentClass::Car, 1.0)};
  const CostMatrix m2 = association_cost(std::span(&t, 1), far, cfg, Homography::identity());
  CHECK(m2.at(0, 0) == kForbidden);
}

TEST_CASE("track lifecycle: confirm, coast, delete") {
  TrackerConfig cfg;
  cfg.pixel_to_world = Homography::identity();
  cfg.confirm_hits = 3;
  cfg.max_misses = 2;
  Tracker tracker(cfg);

  const Detection d = make_detection(0, 0, 0, 10, 10, AgentClass::Car, 1.0);
  tracker.process_frame(0, std::span(&d, 1));
  REQUIRE(tracker.live_tracks().size() == 1);
  CHECK(tracker.live_tracks()[0].status == TrackStatus::Tentative);
  CHECK(tracker.live_tracks()[0].hits == 1);

  for (int f = 1; f < 3; ++f) {
    Detection next = d;
    next.frame_id = f;
    tracker.process_frame(f, std::span(&next, 1));
  }
  REQUIRE(tracker.live_tracks().size() == 1);
  CHECK(tracker.live_tracks()[0].status == TrackStatus::Confirmed);
  CHECK(tracker.live_tracks()[0].hits == 3);

  // Confirmed tracks coast through max_misses frames, then die.
  tracker.process_frame(3, {});
  tracker.process_frame(4, {});
  CHECK(tracker.live_tracks().size() == 1);
  tracker.process_frame(5, {});
  CHECK(tracker.live_tracks().empty());
  CHECK(tracker.confirmed_tracks().size() == 1);  // remembered after deletion
  CHECK(tracker.frames_processed() == 6);
}

TEST_CASE("tentative track dies on its first miss") {
  TrackerConfig cfg;
  cfg.pixel_to_world = Homography::identity();
  Tracker tracker(cfg);
  const Detection d = make_detection(0, 0, 0, 10, 10, AgentClass::Car, 1.0);
  tracker.process_frame(0, std::span(&d, 1));
  tracker.process_frame(1, {});
  CHECK(tracker.live_tracks().empty());
  CHECK(tracker.confirmed_tracks().empty());
}

TEST_CASE("frames must arrive consecutively") {
  TrackerConfig cfg;
  cfg.pixel_to_world = Homography::identity();
  Tracker tracker(cfg);
  tracker.process_frame(0, {});
  CHECK_THROWS_AS(tracker.process_frame(2, {}), FrameOutOfOrder);
}

TEST_CASE("low-confidence detections are ignored") {
  TrackerConfig cfg;
  cfg.pixel_to_world = Homography::identity();
  cfg.min_confidence = 0.7;
  Tracker tracker(cfg);
  const Detection weak = make_detection(0, 0, 0, 10, 10, AgentClass::Car, 0.4);
  tracker.process_frame(0, std::span(&weak, 1));
  CHECK(tracker.live_tracks().empty());
}

TEST_CASE("seeded multi-agent scene tracks identities without switches") {
  // Ten agents on crossing straight courses, noise-free detections.
  const int n_agents = 10;
  const int n_frames = 300;
  const double fps = 30.0;
  const Homography cam = Homography::identity();  // pixel == world for simplicity

  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<WorldPoint> starts;
  std::vector<Vec2> vels;
  for (int a = 0; a < n_agents; ++a) {
    starts.push_back({10.0 + 80.0 * u(rng), 10.0 + 40.0 * u(rng)});
    const double angle = 2.0 * 3.14159265358979323846 * u(rng);
    const double speed = 4.0 + 6.0 * u(rng);
    vels.push_back(rotated({speed, 0.0}, angle));
  }
  const auto pos_at = [&](int a, int f) {
    return starts[static_cast<std::size_t>(a)] + vels[static_cast<std::size_t>(a)] * (f / fps);
  };

  TrackerConfig cfg;
  cfg.pixel_to_world = cam;
  cfg.fps = fps;
  Tracker tracker(cfg);
  for (int f = 0; f < n_frames; ++f) {
    std::vector<Detection> dets;
    for (int a = 0; a < n_agents; ++a)
      dets.push_back(world_detection(f, pos_at(a, f), cam, AgentClass::Car, 2.0));
    tracker.process_frame(f, dets);
  }

  const std::vector<Track> tracks = tracker.confirmed_tracks();
  REQUIRE(tracks.size() == static_cast<std::size_t>(n_agents));

  // Identity-correspondence oracle: each track maps to the agent whose truth
  // it matches most often; every frame entry must then agree with that agent
  // (0 switches) and coverage must be complete.
  int correct = 0, total = 0;
  for (const Track& t : tracks) {
    std::map<int, int> votes;
    for (const TrajectoryPoint& p : t.history) {
      int best_agent = -1;
      double best_d = 1e9;
      for (int a = 0; a < n_agents; ++a) {
        const double d = distance(p.position, pos_at(a, p.frame_id));
        if (d < best_d) {
          best_d = d;
          best_agent = a;
        }
      }
      ++votes[best_agent];
    }
    const auto owner = std::max_element(votes.begin(), votes.end(),
                                        [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const TrajectoryPoint& p : t.history) {
      ++total;
      int best_agent = -1;
      double best_d = 1e9;
      for (int a = 0; a < n_agents; ++a) {
        const double d = distance(p.position, pos_at(a, p.frame_id));
        if (d < best_d) {
          best_d = d;
          best_agent = a;
        }
      }
      if (best_agent == owner->first) ++correct;
    }
    CHECK(votes.size() == 1);  // no identity switches at all
  }
  CHECK(total >= n_agents * (n_frames - 2));  // everything but the confirm ramp
  CHECK(static_cast<double>(correct) / static_cast<double>(total) >= 0.99);
}

TEST_CASE("trajectory export format and round trip") {
  Track t;
  t.id = 1;
  t.cls = AgentClass::Car;
  t.status = TrackStatus::Confirmed;
  t.history = {{1, {1.5, 2.25}}, {2, {1.5, 2.25}}};
  Track t2;
  t2.id = 2;
  t2.cls = AgentClass::Bus;
  t2.status = TrackStatus::Confirmed;
  t2.history = {{1, {-3.0, 0.125}}};
  const std::vector<Track> tracks = {t, t2};

  const auto path = temp_file("trackpred_test_traj.csv");
  export_trajectories(tracks, path);

  // Four-column rows sorted by frame then id, six decimals, no header.
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "1,1,1.500000,2.250000");
  std::getline(in, line);
  CHECK(line == "1,2,-3.000000,0.125000");
  std::getline(in, line);
  CHECK(line == "2,1,1.500000,2.250000");
  CHECK_FALSE(std::getline(in, line));
  in.close();

  const std::vector<TrajectoryRecord> records = parse_trajectory_file(path);
  REQUIRE(records.size() == 3);
  CHECK(records[0].frame_id == 1);
  CHECK(records[0].vehicle_id == 1);
  CHECK(records[0].x == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(records[1].y == doctest::Approx(0.125).epsilon(1e-12));
  std::filesystem::remove(path);

  // Empty track set exports an empty (header-only) file.
  const auto empty_path = temp_file("trackpred_test_empty.csv");
  export_trajectories({}, empty_path);
  CHECK(parse_trajectory_file(empty_path).empty());
  std::filesystem::remove(empty_path);
}

TEST_CASE("detection file round trip") {
  // The appearance dimension is fixed per file by the header, so every
  // detection written together must carry the same dimension (or none).
  std::vector<Detection> dets;
  dets.push_back(make_detection(0, 1.25, 2.5, 30.0, 40.0, AgentClass::Car, 0.9));
  dets.push_back(make_detection(1, -5.0, 0.0, 10.0, 10.0, AgentClass::Pedestrian, 0.75));
  dets.push_back(make_detection(1, 7.0, 8.0, 5.0, 5.0, AgentClass::Bus, 1.0));
  dets[0].appearance = std::vector<double>{1.0, 0.0, 0.5};
  dets[1].appearance = std::vector<double>{0.0, 1.0, -1.0};
  dets[2].appearance = std::vector<double>{0.5, -0.25, 0.125};

  const auto path = temp_file("trackpred_test_dets.csv");
  write_detection_file(dets, path);
  const std::vector<Detection> back = read_detection_file(path);
  REQUIRE(back.size() == 3);
  CHECK(back[0].frame_id == 0);
  CHECK(back[0].bbox[0] == doctest::Approx(1.25).epsilon(1e-9));
  CHECK(back[0].cls == AgentClass::Car);
  CHECK(back[1].cls == AgentClass::Pedestrian);
  REQUIRE(back[2].appearance.has_value());
  REQUIRE(back[2].appearance->size() == 3);
  CHECK((*back[2].appearance)[2] == doctest::Approx(0.125).epsilon(1e-9));
  std::filesystem::remove(path);

  // Appearance-free files stay at seven columns and read back without one.
  const auto bare_path = temp_file("trackpred_test_dets_bare.csv");
  std::vector<Detection> bare;
  bare.push_back(make_detection(2, 0.5, 0.5, 3.0, 3.0, AgentClass::Bicycle, 0.6));
  write_detection_file(bare, bare_path);
  const std::vector<Detection> bare_back = read_detection_file(bare_path);
  REQUIRE(bare_back.size() == 1);
  CHECK(bare_back[0].cls == AgentClass::Bicycle);
  CHECK_FALSE(bare_back[0].appearance.has_value());
  std::filesystem::remove(bare_path);

  // Mixed appearance dimensions cannot share one file.
  std::vector<Detection> mixed = bare;
  mixed.push_back(dets[0]);
  CHECK_THROWS_AS(write_detection_file(mixed, bare_path), LengthMismatch);
}

TEST_CASE("class sidecar round trip") {
  std::unordered_map<int, AgentClass> classes = {{1, AgentClass::Car}, {7, AgentClass::Pedestrian}};
  const auto path = temp_file("trackpred_test_classes.csv");
  write_class_sidecar(classes, path);
  const std::unordered_map<int, AgentClass> back = read_class_sidecar(path);
  REQUIRE(back.size() == 2);
  CHECK(back.at(1) == AgentClass::Car);
  CHECK(back.at(7) == AgentClass::Pedestrian);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
