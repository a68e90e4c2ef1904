// SPDX-License-Identifier: Apache-2.0
#include "trackpred/assignment.hpp"

#include <algorithm>
#include <cmath>

#include "trackpred/errors.hpp"

namespace trackpred {

namespace {

// Kuhn-Munkres via shortest augmenting paths over row/column potentials.
// Requires rows <= cols; indices are 1-based internally with column 0 as the
// virtual start of each augmenting path.
std::vector<int> solve_rect(const CostMatrix& a) {
  const int n = static_cast<int>(a.rows);
  const int m = static_cast<int>(a.cols);
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(m) + 1, 0), way(static_cast<std::size_t>(m) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m) + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = a.at(static_cast<std::size_t>(i0 - 1), static_cast<std::size_t>(j - 1)) -
                           u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment assign(const CostMatrix& cost) {
  Assignment out;
  if (cost.rows == 0 || cost.cols == 0) {
    for (std::size_t r = 0; r < cost.rows; ++r) out.unmatched_rows.push_back(static_cast<int>(r));
    for (std::size_t c = 0; c < cost.cols; ++c) out.unmatched_cols.push_back(static_cast<int>(c));
    return out;
  }

  double max_abs = 0.0;
  for (double c : cost.v) {
    if (std::isnan(c)) throw Error("assignment cost matrix contains NaN");
    if (std::isfinite(c)) max_abs = std::max(max_abs, std::abs(c));
  }
  // Forbidden pairs become a finite cost so large that the solver first
  // minimizes how many are used (equivalently, maximizes the size of the
  // forbidden-free matching), then the finite cost.
  const double big =
      2.0 * (max_abs * static_cast<double>(std::min(cost.rows, cost.cols)) + 1.0);

  const bool transposed = cost.rows > cost.cols;
  CostMatrix a(transposed ? cost.cols : cost.rows, transposed ? cost.rows : cost.cols);
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t c = 0; c < a.cols; ++c) {
      const double x = transposed ? cost.at(c, r) : cost.at(r, c);
      a.at(r, c) = std::isfinite(x) ? x : big;
    }
  }

  const std::vector<int> row_to_col = solve_rect(a);

  std::vector<char> row_matched(cost.rows, 0), col_matched(cost.cols, 0);
  for (std::size_t i = 0; i < row_to_col.size(); ++i) {
    if (row_to_col[i] < 0) continue;
    const std::size_t r = transposed ? static_cast<std::size_t>(row_to_col[i]) : i;
    const std::size_t c = transposed ? i : static_cast<std::size_t>(row_to_col[i]);
    const double original = cost.at(r, c);
    if (!std::isfinite(original)) continue;  // forbidden pair: leave both sides unmatched
    out.matches.emplace_back(static_cast<int>(r), static_cast<int>(c));
    out.total_cost += original;
    row_matched[r] = 1;
    col_matched[c] = 1;
  }
  std::sort(out.matches.begin(), out.matches.end());
  for (std::size_t r = 0; r < cost.rows; ++r) {
    if (!row_matched[r]) out.unmatched_rows.push_back(static_cast<int>(r));
  }
  for (std::size_t c = 0; c < cost.cols; ++c) {
    if (!col_matched[c]) out.unmatched_cols.push_back(static_cast<int>(c));
  }
  return out;
}

}  // namespace trackpred
