// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <span>

#include "trackpred/types.hpp"

namespace trackpred {

/// Row-major 3x3 projective map. The tracker-facing convention is
/// pixel -> world; use inverse() for the opposite direction.
struct Homography {
  std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Homography identity() { return {}; }

  double at(int r, int c) const { return h[static_cast<std::size_t>(3 * r + c)]; }
  double& at(int r, int c) { return h[static_cast<std::size_t>(3 * r + c)]; }

  double determinant() const;
  /// Throws DegenerateConfiguration when |det| <= 1e-12.
  Homography inverse() const;
  /// Scales so that h[2][2] == 1 when that entry is usably non-zero,
  /// otherwise to unit Frobenius norm with a deterministic sign.
  Homography normalized() const;
};

/// Applies h to (u, v, 1); throws DegenerateProjection when |w'| <= 1e-12.
WorldPoint project_to_world(const Homography& pixel_to_world, PixelPoint p);
/// Same map in the world -> pixel direction; pass an inverted calibration.
PixelPoint project_to_pixel(const Homography& world_to_pixel, WorldPoint p);

/// Least-squares homography from >= 4 pixel/world correspondences via the
/// normalized direct linear transform. Throws DegenerateConfiguration when the
/// correspondences do not determine a homography (collinear inputs and
/// near-rank-deficient systems: second-smallest singular value ratio < 1e-10).
Homography estimate_homography(std::span<const PixelPoint> pixel, std::span<const WorldPoint> world);

/// File format: 9 whitespace-separated numbers, row-major.
Homography read_homography(const std::filesystem::path& path);
void write_homography(const Homography& h, const std::filesystem::path& path);

}  // namespace trackpred
