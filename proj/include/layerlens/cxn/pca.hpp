#pragma once

#include <cmath>

#include <Eigen/SVD>

#include "layerlens/error.hpp"
#include "layerlens/types.hpp"

namespace layerlens::cxn {

struct PcaResult {
  MatrixXd scores;           // n x components
  MatrixXd directions;       // D x components, unit columns
  VectorXd explained_ratio;  // per component, non-increasing
  Eigen::Index rank = 0;
};

/// Projects centered rows onto the top right-singular vectors. Each direction is
/// signed so that its largest-magnitude loading is positive.
template <typename Derived>
PcaResult pca_project(const Eigen::MatrixBase<Derived>& data, Eigen::Index components = 2) {
  const auto n = data.rows();
  const auto dim = data.cols();
  if (n < 2) throw Error(ErrorCategory::validation, "pca_project: need at least 2 rows");
  if (components < 1 || components > std::min(n, dim)) {
    throw Error(ErrorCategory::validation, "pca_project: components must be in [1, min(n, D)]");
  }
  const MatrixXd x = data.template cast<double>();
  const MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::BDCSVD<MatrixXd> svd(centered, Eigen::ComputeThinV);
  const VectorXd& s = svd.singularValues();

  PcaResult out;
  const double tol = static_cast<double>(std::max(n, dim)) * Eigen::NumTraits<double>::epsilon() *
                     (s.size() > 0 ? s(0) : 0.0);
  out.rank = (s.array() > tol).count();
  if (components > out.rank) {
    throw RankError(out.rank, "pca_project: requested " + std::to_string(components) + " components");
  }
  const double total = s.squaredNorm();
  out.directions = svd.matrixV().leftCols(components);
  for (Eigen::Index c = 0; c < components; ++c) {
    Eigen::Index arg = 0;
    out.directions.col(c).cwiseAbs().maxCoeff(&arg);
    if (out.directions(arg, c) < 0) out.directions.col(c) *= -1.0;
  }
  out.explained_ratio = s.head(components).array().square() / total;
  out.scores = centered * out.directions;
  return out;
}

}  // namespace layerlens::cxn
