#pragma once

#include <span>

#include "layerlens/types.hpp"

namespace layerlens::cxn {

/// num_labels x num_labels counts: rows are cluster ids, columns reference labels.
Eigen::MatrixXi contingency(std::span<const int> assignment, std::span<const int> reference, int num_labels);

/// Minimum number of items whose cluster must change to reach the reference
/// partition: n minus the best cluster-to-label agreement found by Hungarian
/// matching on the contingency table. Lies in [0, 12] for the 4 x 4 design.
int sort_deviation(std::span<const int> assignment, std::span<const int> reference, int num_labels = 4);

}  // namespace layerlens::cxn
