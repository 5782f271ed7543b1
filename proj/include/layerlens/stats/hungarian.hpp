#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "layerlens/error.hpp"

namespace layerlens::stats {

struct Assignment {
  /// assignment[row] = column.
  std::vector<int> assignment;
  double total = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
/// row/column potentials, O(k^3)).
template <typename Derived>
Assignment hungarian_min_cost(const Eigen::MatrixBase<Derived>& cost) {
  const auto n = static_cast<int>(cost.rows());
  if (cost.cols() != cost.rows()) {
    throw Error(ErrorCategory::shape, "hungarian_min_cost: cost matrix must be square");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(static_cast<double>(cost(i, j)))) {
        throw Error(ErrorCategory::validation, "hungarian_min_cost: non-finite cost entry");
      }
    }
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual start column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> row_of_col(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    row_of_col[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int i0 = row_of_col[col0];
      double delta = inf;
      int col1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = static_cast<double>(cost(i0 - 1, j - 1)) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = col0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          col1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      col0 = col1;
    } while (row_of_col[col0] != 0);
    do {
      const int col1 = way[col0];
      row_of_col[col0] = row_of_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  Assignment result;
  result.assignment.assign(n, -1);
  for (int j = 1; j <= n; ++j) result.assignment[row_of_col[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) result.total += static_cast<double>(cost(i, result.assignment[i]));
  return result;
}

}  // namespace layerlens::stats
