#include "layerlens/cxn/deviation.hpp"

#include <string>

#include "layerlens/cxn/clustering.hpp"
#include "layerlens/error.hpp"
#include "layerlens/stats/hungarian.hpp"

namespace layerlens::cxn {

std::string_view linkage_name(Linkage l) noexcept {
  switch (l) {
    case Linkage::ward: return "ward";
    case Linkage::complete: return "complete";
    case Linkage::average: return "average";
    case Linkage::single: return "single";
  }
  return "ward";
}

Linkage parse_linkage(std::string_view name) {
  if (name == "ward") return Linkage::ward;
  if (name == "complete") return Linkage::complete;
  if (name == "average") return Linkage::average;
  if (name == "single") return Linkage::single;
  throw Error(ErrorCategory::config, "unknown linkage '" + std::string(name) + "'");
}

Eigen::MatrixXi contingency(std::span<const int> assignment, std::span<const int> reference, int num_labels) {
  if (assignment.size() != reference.size()) throw Error(ErrorCategory::shape, "contingency: length mismatch");
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(num_labels, num_labels);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int a = assignment[i];
    const int r = reference[i];
    if (a < 0 || a >= num_labels || r < 0 || r >= num_labels) {
      throw Error(ErrorCategory::validation, "label out of range [0, " + std::to_string(num_labels) +
                                                 ") at position " + std::to_string(i));
    }
    ++table(a, r);
  }
  return table;
}

int sort_deviation(std::span<const int> assignment, std::span<const int> reference, int num_labels) {
  const Eigen::MatrixXi table = contingency(assignment, reference, num_labels);
  const auto match = stats::hungarian_min_cost((-table).cast<double>());
  const auto agreement = static_cast<int>(std::lround(-match.total));
  return static_cast<int>(assignment.size()) - agreement;
}

}  // namespace layerlens::cxn
