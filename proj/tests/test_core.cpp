// SPDX-License-Identifier: Apache-2.0
// Planar projection, homography estimation, and the per-agent kinematic
// state. Derived expectations come from independent oracles computed here:
// direct homogeneous multiplication, hand differences, exhaustive counts.
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "trackpred/errors.hpp"
#include "trackpred/homography.hpp"
#include "trackpred/state_space.hpp"
#include "trackpred/types.hpp"

using namespace trackpred;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

// Independent projection oracle: multiply the homogeneous 3-vector, divide.
WorldPoint project_oracle(const Homography& h, PixelPoint p) {
  const double x = h.at(0, 0) * p.u + h.at(0, 1) * p.v + h.at(0, 2);
  const double y = h.at(1, 0) * p.u + h.at(1, 1) * p.v + h.at(1, 2);
  const double w = h.at(2, 0) * p.u + h.at(2, 1) * p.v + h.at(2, 2);
  return {x / w, y / w};
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("vec2 helpers") {
  CHECK(norm(Vec2{3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(norm_sq(Vec2{3.0, 4.0}) == doctest::Approx(25.0));
  CHECK(dot(Vec2{1.0, 2.0}, Vec2{3.0, 4.0}) == doctest::Approx(11.0));
  CHECK(det(Vec2{1.0, 0.0}, Vec2{0.0, 1.0}) == doctest::Approx(1.0));
  const Vec2 r = rotated(Vec2{1.0, 0.0}, 3.14159265358979323846 / 2.0);
  CHECK(r.x == doctest::Approx(0.0));
  CHECK(r.y == doctest::Approx(1.0));
  CHECK(normalized(Vec2{0.0, 0.0}).x == 0.0);
  CHECK(wrap_angle(3.0 * 3.14159265358979323846) == doctest::Approx(3.14159265358979323846));
  CHECK(disc_radius({4.0, 3.0}) == doctest::Approx(2.5));
}

TEST_CASE("projection identity and scaling") {
  const Homography id = Homography::identity();
  const WorldPoint p = project_to_world(id, {10.0, 20.0});
  CHECK(p.x == doctest::Approx(10.0));
  CHECK(p.y == doctest::Approx(20.0));

  Homography scale;
  scale.at(0, 0) = 2.0;
  scale.at(1, 1) = 2.0;
  const WorldPoint q = project_to_world(scale, {10.0, 20.0});
  CHECK(q.x == doctest::Approx(20.0));
  CHECK(q.y == doctest::Approx(40.0));
}

TEST_CASE("projection matches the homogeneous oracle") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Homography h;
  h.h = {1.2, 0.1, 3.0, -0.2, 0.9, -2.0, 1e-4, -2e-4, 1.0};
  for (int i = 0; i < 50; ++i) {
    const PixelPoint p{500.0 * u(rng) + 600.0, 300.0 * u(rng) + 400.0};
    const WorldPoint got = project_to_world(h, p);
    const WorldPoint want = project_oracle(h, p);
    CHECK(got.x == doctest::Approx(want.x).epsilon(1e-10));
    CHECK(got.y == doctest::Approx(want.y).epsilon(1e-10));
  }
}

TEST_CASE("projection rejects points mapped to the line at infinity") {
  Homography h;
  h.h = {1, 0, 0, 0, 1, 0, 0, 1, 0};  // w' = v: vanishes at v = 0
  CHECK_THROWS_AS(project_to_world(h, {5.0, 0.0}), DegenerateProjection);
}

TEST_CASE("estimation recovers a known homography") {
  Homography truth;
  truth.h = {1, 0, 3, 0, 1, -2, 0, 0, 1};
  std::vector<PixelPoint> pixel = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.3, 0.7}};
  std::vector<WorldPoint> world;
  for (const PixelPoint& p : pixel) world.push_back(project_to_world(truth, p));
  const Homography est = estimate_homography(pixel, world).normalized();
  const Homography want = truth.normalized();
  for (int i = 0; i < 9; ++i) CHECK(est.h[static_cast<std::size_t>(i)] ==
                                    doctest::Approx(want.h[static_cast<std::size_t>(i)]).epsilon(1e-8));
}

TEST_CASE("estimation of the identity from the unit square") {
  std::vector<PixelPoint> pixel = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<WorldPoint> world = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Homography est = estimate_homography(pixel, world).normalized();
  const Homography id = Homography::identity().normalized();
  for (int i = 0; i < 9; ++i)
    CHECK(est.h[static_cast<std::size_t>(i)] == doctest::Approx(id.h[static_cast<std::size_t>(i)]).epsilon(1e-8));
}

TEST_CASE("estimation rejects collinear correspondences") {
  std::vector<PixelPoint> pixel = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  std::vector<WorldPoint> world = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  CHECK_THROWS_AS(estimate_homography(pixel, world), DegenerateConfiguration);
}

TEST_CASE("estimation recovers a perspective map from noisy-free correspondences") {
  Homography truth;
  truth.h = {0.9, 0.05, 12.0, -0.1, 1.1, -7.0, 2e-4, 1e-4, 1.0};
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<PixelPoint> pixel;
  std::vector<WorldPoint> world;
  for (int i = 0; i < 12; ++i) {
    const PixelPoint p{u(rng), u(rng) * 0.6};
    pixel.push_back(p);
    world.push_back(project_to_world(truth, p));
  }
  const Homography est = estimate_homography(pixel, world);
  for (int i = 0; i < 30; ++i) {
    const PixelPoint p{u(rng), u(rng) * 0.6};
    const WorldPoint got = project_to_world(est, p);
    const WorldPoint want = project_to_world(truth, p);
    CHECK(got.x == doctest::Approx(want.x).epsilon(1e-6));
    CHECK(got.y == doctest::Approx(want.y).epsilon(1e-6));
  }
}

TEST_CASE("homography file round trip") {
  Homography h;
  h.h = {1.25, -0.5, 3.0, 0.0, 2.0, -1.5, 1e-5, 0.0, 1.0};
  const auto path = temp_file("trackpred_test_h.txt");
  write_homography(h, path);
  const Homography back = read_homography(path);
  for (int i = 0; i < 9; ++i)
    CHECK(back.h[static_cast<std::size_t>(i)] == doctest::Approx(h.h[static_cast<std::size_t>(i)]).epsilon(1e-12));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_homography(temp_file("trackpred_no_such_file.txt")), IoFailure);
}

TEST_CASE("inverse composes to the identity") {
  Homography h;
  h.h = {0.9, 0.05, 12.0, -0.1, 1.1, -7.0, 2e-4, 1e-4, 1.0};
  const Homography inv = h.inverse();
  const PixelPoint p{321.0, 654.0};
  const WorldPoint w = project_to_world(h, p);
  const PixelPoint back = project_to_pixel(inv, w);
  CHECK(back.u == doctest::Approx(p.u).epsilon(1e-9));
  CHECK(back.v == doctest::Approx(p.v).epsilon(1e-9));

  // Inverting twice returns the original matrix (up to normalization).
  const Homography twice = inv.inverse();
  const Homography want = h.normalized();
  for (int i = 0; i < 9; ++i)
    CHECK(twice.h[static_cast<std::size_t>(i)] ==
          doctest::Approx(want.h[static_cast<std::size_t>(i)]).epsilon(1e-8));
}

TEST_CASE("derivative of stationary and linear motion") {
  Trajectory stat;
  stat.points = {{0, {2.0, 3.0}}, {1, {2.0, 3.0}}, {2, {2.0, 3.0}}};
  for (const Vec2 v : derivative(stat, 30.0)) {
    CHECK(v.x == doctest::Approx(0.0));
    CHECK(v.y == doctest::Approx(0.0));
  }

  Trajectory lin;
  for (int i = 0; i < 10; ++i) lin.points.push_back({i, {0.5 * i, 0.0}});
  for (const Vec2 v : derivative(lin, 30.0)) {
    CHECK(v.x == doctest::Approx(15.0));
    CHECK(v.y == doctest::Approx(0.0));
  }
}

TEST_CASE("derivative of quadratic motion matches hand differences") {
  Trajectory quad;
  for (int i = 0; i < 8; ++i)
    quad.points.push_back({i, {static_cast<double>(i) * static_cast<double>(i), 0.0}});
  const std::vector<Vec2> v = derivative(quad, 1.0);
  REQUIRE(v.size() == quad.points.size());
  for (std::size_t i = 1; i < v.size(); ++i)
    CHECK(v[i].x == doctest::Approx(2.0 * static_cast<double>(i) - 1.0));
  CHECK(v[0].x == doctest::Approx(v[1].x));  // first entry duplicates the second
}

TEST_CASE("derivative validates its input") {
  Trajectory one;
  one.points = {{0, {0.0, 0.0}}};
  CHECK_THROWS_AS(derivative(one, 30.0), TooShort);

  Trajectory unordered;
  unordered.points = {{0, {0.0, 0.0}}, {2, {1.0, 0.0}}, {1, {2.0, 0.0}}};
  CHECK_THROWS_AS(derivative(unordered, 30.0), FrameOutOfOrder);
}

TEST_CASE("concentration counts the half-open box") {
  CHECK(concentration({}, {0.0, 0.0}, {1.0, 1.0}) == 0);

  const std::vector<WorldPoint> self = {{3.0, 4.0}};
  CHECK(concentration(self, {3.0, 4.0}, {1.0, 1.0}) >= 1);

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<WorldPoint> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({u(rng), u(rng)});
  CHECK(concentration(pts, {0.0, 0.0}, {10.0, 10.0}) == 100);

  // Exhaustive oracle on a random query box.
  const WorldPoint q{2.5, 3.5};
  const Vec2 d{4.0, 2.0};
  int expected = 0;
  for (const WorldPoint& p : pts)
    if (p.x >= q.x && p.x < q.x + d.x && p.y >= q.y && p.y < q.y + d.y) ++expected;
  CHECK(concentration(pts, q, d) == expected);

  CHECK_THROWS_AS(concentration(pts, q, Vec2{0.0, 1.0}), InvalidDelta);
  CHECK_THROWS_AS(concentration(pts, q, Vec2{1.0, -1.0}), InvalidDelta);
}

TEST_CASE("gap repair splits large gaps and interpolates small ones") {
  Trajectory t;
  t.points = {{0, {0.0, 0.0}}, {1, {1.0, 0.0}}, {4, {4.0, 0.0}}, {20, {20.0, 0.0}}, {21, {21.0, 0.0}}};
  const std::vector<Trajectory> segs = repair_gaps(t, 5);
  REQUIRE(segs.size() == 2);
  REQUIRE(segs[0].points.size() == 5);  // frames 0..4 with 2,3 interpolated
  CHECK(segs[0].points[2].position.x == doctest::Approx(2.0));
  CHECK(segs[0].points[3].position.x == doctest::Approx(3.0));
  CHECK(segs[1].points.size() == 2);
  CHECK(segs[1].points[0].frame_id == 20);
}

TEST_CASE("state space fields match per-component recomputation") {
  // Five agents on simple courses; ego is agent 0.
  std::vector<Trajectory> all(5);
  for (int a = 0; a < 5; ++a) {
    all[static_cast<std::size_t>(a)].agent_id = a;
    for (int i = 0; i < 12; ++i)
      all[static_cast<std::size_t>(a)].points.push_back(
          {i, {0.3 * i + 2.0 * a, 0.1 * i * (a % 2 == 0 ? 1.0 : -1.0)}});
  }
  const Vec2 delta{2.0, 2.0};
  const AgentSize size{4.5, 1.8};
  const StateSpace s = build_state_space(all[0], all, delta, size, 10.0);

  REQUIRE(s.history.points.size() == 12);
  REQUIRE(s.velocities.size() == 12);
  REQUIRE(s.concentration.size() == 12);
  CHECK(s.size.length == doctest::Approx(4.5));

  const std::vector<Vec2> v_oracle = derivative(all[0], 10.0);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(s.velocities[i].x == doctest::Approx(v_oracle[i].x));
    CHECK(s.velocities[i].y == doctest::Approx(v_oracle[i].y));
    std::vector<WorldPoint> frame_positions;
    for (const Trajectory& t : all) frame_positions.push_back(t.points[i].position);
    const int c_oracle =
        concentration(frame_positions, all[0].points[i].position, delta);
    CHECK(s.concentration[i] == c_oracle);
  }

  // Single agent in linear motion keeps concentration 1 (itself).
  const StateSpace lone = build_state_space(all[0], std::span<const Trajectory>(all.data(), 1), delta, size, 10.0);
  for (const int c : lone.concentration) CHECK(c == 1);
}

}  // TEST_SUITE
