#pragma once

#include <span>
#include <vector>

namespace layerlens::stats {

double mean(std::span<const double> x);
/// Sample standard deviation (denominator n - 1).
double sample_sd(std::span<const double> x);

/// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> x);

/// Product-moment correlation. Throws DegenerateError on a constant input.
double pearson(std::span<const double> a, std::span<const double> b);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace layerlens::stats
