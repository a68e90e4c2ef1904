// SPDX-License-Identifier: Apache-2.0
#include "trackpred/homography.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trackpred/errors.hpp"

namespace trackpred {

namespace {

Eigen::Matrix3d to_eigen(const Homography& h) {
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = h.at(r, c);
  return m;
}

Homography from_eigen(const Eigen::Matrix3d& m) {
  Homography h;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) h.at(r, c) = m(r, c);
  return h;
}

// Hartley normalization: centroid to origin, mean distance to sqrt(2).
Eigen::Matrix3d similarity_transform(const Eigen::MatrixX2d& pts) {
  const Eigen::RowVector2d centroid = pts.colwise().mean();
  double mean_dist = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) mean_dist += (pts.row(i) - centroid).norm();
  mean_dist /= static_cast<double>(pts.rows());
  const double scale = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = scale;
  t(1, 1) = scale;
  t(0, 2) = -scale * centroid(0);
  t(1, 2) = -scale * centroid(1);
  return t;
}

}  // namespace

double Homography::determinant() const { return to_eigen(*this).determinant(); }

Homography Homography::inverse() const {
  const Eigen::Matrix3d m = to_eigen(*this);
  const double d = m.determinant();
  if (std::abs(d) <= 1e-12) throw DegenerateConfiguration("homography is not invertible");
  return from_eigen(Eigen::Matrix3d(m.inverse())).normalized();
}

Homography Homography::normalized() const {
  Homography out = *this;
  const double w = out.at(2, 2);
  if (std::abs(w) > 1e-12) {
    for (double& v : out.h) v /= w;
    return out;
  }
  double f = 0.0;
  for (double v : out.h) f += v * v;
  f = std::sqrt(f);
  if (f <= 0.0) throw DegenerateConfiguration("zero homography");
  // Deterministic sign: first entry with the largest magnitude made positive.
  double lead = 0.0;
  for (double v : out.h) {
    if (std::abs(v) > std::abs(lead)) lead = v;
  }
  const double s = lead < 0.0 ? -1.0 / f : 1.0 / f;
  for (double& v : out.h) v *= s;
  return out;
}

WorldPoint project_to_world(const Homography& pixel_to_world, PixelPoint p) {
  const auto& h = pixel_to_world.h;
  const double xp = h[0] * p.u + h[1] * p.v + h[2];
  const double yp = h[3] * p.u + h[4] * p.v + h[5];
  const double wp = h[6] * p.u + h[7] * p.v + h[8];
  if (std::abs(wp) <= 1e-12) throw DegenerateProjection("projection maps point to infinity");
  return {xp / wp, yp / wp};
}

PixelPoint project_to_pixel(const Homography& world_to_pixel, WorldPoint p) {
  const auto& h = world_to_pixel.h;
  const double up = h[0] * p.x + h[1] * p.y + h[2];
  const double vp = h[3] * p.x + h[4] * p.y + h[5];
  const double wp = h[6] * p.x + h[7] * p.y + h[8];
  if (std::abs(wp) <= 1e-12) throw DegenerateProjection("projection maps point to infinity");
  return {up / wp, vp / wp};
}

Homography estimate_homography(std::span<const PixelPoint> pixel, std::span<const WorldPoint> world) {
  if (pixel.size() != world.size()) throw LengthMismatch("correspondence lists differ in length");
  const auto n = static_cast<Eigen::Index>(pixel.size());
  if (n < 4) throw TooShort("homography estimation needs at least 4 correspondences");

  Eigen::MatrixX2d src(n, 2), dst(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    src(i, 0) = pixel[static_cast<std::size_t>(i)].u;
    src(i, 1) = pixel[static_cast<std::size_t>(i)].v;
    dst(i, 0) = world[static_cast<std::size_t>(i)].x;
    dst(i, 1) = world[static_cast<std::size_t>(i)].y;
  }
  const Eigen::Matrix3d t_src = similarity_transform(src);
  const Eigen::Matrix3d t_dst = similarity_transform(dst);

  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = t_src(0, 0) * src(i, 0) + t_src(0, 2);
    const double v = t_src(1, 1) * src(i, 1) + t_src(1, 2);
    const double x = t_dst(0, 0) * dst(i, 0) + t_dst(0, 2);
    const double y = t_dst(1, 1) * dst(i, 1) + t_dst(1, 2);
    a.row(2 * i) << -u, -v, -1, 0, 0, 0, u * x, v * x, x;
    a.row(2 * i + 1) << 0, 0, 0, -u, -v, -1, u * y, v * y, y;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A rank below 8 leaves a >1-dimensional solution family: degenerate input.
  if (sv(0) <= 0.0 || sv(7) / sv(0) < 1e-10) {
    throw DegenerateConfiguration("correspondences do not determine a homography");
  }
  const Eigen::VectorXd hv = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << hv(0), hv(1), hv(2), hv(3), hv(4), hv(5), hv(6), hv(7), hv(8);

  const Eigen::Matrix3d h = t_dst.inverse() * hn * t_src;
  if (std::abs(h.determinant()) <= 1e-12) throw DegenerateConfiguration("estimated homography is singular");
  return from_eigen(h).normalized();
}

Homography read_homography(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open homography file: " + path.string());
  Homography h;
  for (double& v : h.h) {
    if (!(in >> v)) throw ParseError(1, "homography file needs 9 numbers: " + path.string());
  }
  double extra;
  if (in >> extra) throw ParseError(1, "homography file has trailing data: " + path.string());
  return h;
}

void write_homography(const Homography& h, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write homography file: " + path.string());
  char buf[64];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", h.at(r, c));
      out << buf << (c == 2 ? '\n' : ' ');
    }
  }
  if (!out) throw IoFailure("failed writing homography file: " + path.string());
}

}  // namespace trackpred
