// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace trackpred {

struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

/// Pairs excluded from matching entirely.
inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

struct Assignment {
  std::vector<std::pair<int, int>> matches;  // (row, col), ordered by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
  double total_cost = 0.0;
};

/// Minimum-cost assignment (Kuhn-Munkres with potentials). Among all
/// matchings that avoid kForbidden entries, returns one of maximum size and,
/// within that, minimum total cost. Rectangular matrices leave the surplus
/// side unmatched. Throws Error on NaN costs.
Assignment assign(const CostMatrix& cost);

}  // namespace trackpred
