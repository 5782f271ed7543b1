#pragma once

#include <string>

#include "layerlens/error.hpp"
#include "layerlens/types.hpp"

namespace layerlens::cxn {

/// Per-dimension mean and standard deviation from a reference sample.
struct StandardizationCalibration {
  VectorXd mean;
  VectorXd std;  // strictly positive
  std::string source_id;

  /// Throws Error(validation) naming the first nonpositive dimension.
  void validate() const;
};

/// Column means and population standard deviations (denominator n) of `sample`.
template <typename Derived>
StandardizationCalibration fit_calibration(const Eigen::MatrixBase<Derived>& sample, std::string source_id = {}) {
  if (sample.rows() < 1) throw Error(ErrorCategory::empty, "fit_calibration: empty sample");
  const MatrixXd x = sample.template cast<double>();
  StandardizationCalibration cal;
  cal.mean = x.colwise().mean().transpose();
  cal.std = ((x.rowwise() - cal.mean.transpose()).colwise().squaredNorm() / static_cast<double>(x.rows()))
                .cwiseSqrt()
                .transpose();
  cal.source_id = std::move(source_id);
  cal.validate();
  return cal;
}

/// out(i, j) = (in(i, j) - mean(j)) / std(j).
template <typename Derived>
MatrixXd standardize(const Eigen::MatrixBase<Derived>& rows, const StandardizationCalibration& cal) {
  cal.validate();
  if (rows.cols() != cal.mean.size()) throw Error(ErrorCategory::shape, "standardize: dimension mismatch");
  return ((rows.template cast<double>().rowwise() - cal.mean.transpose()).array().rowwise() /
          cal.std.transpose().array())
      .matrix();
}

StandardizationCalibration load_calibration(const std::string& path);
void save_calibration(const StandardizationCalibration& cal, const std::string& path);

}  // namespace layerlens::cxn
