#pragma once

#include <Eigen/Core>

namespace layerlens {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using RowMatrixXf = RowMatrix<float>;

/// Strided read-only view of one layer plane of an embedding tensor.
using LayerView = Eigen::Map<const RowMatrixXf, 0, Eigen::OuterStride<>>;

}  // namespace layerlens
