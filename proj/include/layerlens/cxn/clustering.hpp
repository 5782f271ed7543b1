#pragma once

#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "layerlens/error.hpp"
#include "layerlens/types.hpp"

namespace layerlens::cxn {

enum class Linkage { ward, complete, average, single };

std::string_view linkage_name(Linkage l) noexcept;
Linkage parse_linkage(std::string_view name);

/// Bottom-up agglomerative clustering of the rows of `points` into `k` clusters
/// with Lance-Williams distance updates (Ward works on squared Euclidean
/// distances, the others on Euclidean). Among equal linkage values the pair
/// (i, j), i < j, that is lexicographically smallest is merged; the merged
/// cluster keeps slot i. Labels are numbered by first appearance over rows.
template <typename Derived>
std::vector<int> agglomerative_cluster(const Eigen::MatrixBase<Derived>& points, int k,
                                       Linkage linkage = Linkage::ward) {
  const auto n = static_cast<int>(points.rows());
  if (k < 1 || k > n) throw Error(ErrorCategory::validation, "agglomerative_cluster: k must be in [1, n]");
  const MatrixXd x = points.template cast<double>();
  if (!x.allFinite()) throw Error(ErrorCategory::validation, "agglomerative_cluster: non-finite coordinate");

  MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d2 = (x.row(i) - x.row(j)).squaredNorm();
      dist(i, j) = linkage == Linkage::ward ? d2 : std::sqrt(d2);
    }
  }
  std::vector<int> size(n, 1);
  std::vector<bool> active(n, true);
  std::vector<int> slot_of(n);
  for (int i = 0; i < n; ++i) slot_of[i] = i;

  for (int clusters = n; clusters > k; --clusters) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (active[j] && dist(i, j) < best) {
          best = dist(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    const double ni = size[bi], nj = size[bj];
    for (int m = 0; m < n; ++m) {
      if (!active[m] || m == bi || m == bj) continue;
      const double nm = size[m];
      double updated = 0.0;
      switch (linkage) {
        case Linkage::ward:
          updated = ((ni + nm) * dist(bi, m) + (nj + nm) * dist(bj, m) - nm * dist(bi, bj)) / (ni + nj + nm);
          break;
        case Linkage::complete: updated = std::max(dist(bi, m), dist(bj, m)); break;
        case Linkage::average: updated = (ni * dist(bi, m) + nj * dist(bj, m)) / (ni + nj); break;
        case Linkage::single: updated = std::min(dist(bi, m), dist(bj, m)); break;
      }
      dist(bi, m) = dist(m, bi) = updated;
    }
    size[bi] += size[bj];
    active[bj] = false;
    for (auto& s : slot_of) {
      if (s == bj) s = bi;
    }
  }

  std::vector<int> label_of_slot(n, -1);
  std::vector<int> labels(n);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    auto& l = label_of_slot[slot_of[i]];
    if (l < 0) l = next++;
    labels[i] = l;
  }
  return labels;
}

}  // namespace layerlens::cxn
