#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "layerlens/error.hpp"
#include "layerlens/types.hpp"

namespace layerlens::gauss {

enum class CovarianceKind { full, diagonal, spherical };
enum class Aggregation { sum, max };

std::string_view kind_name(CovarianceKind kind) noexcept;
/// Accepts "full", "diag"/"diagonal", "spherical".
CovarianceKind parse_kind(std::string_view name);
std::string_view aggregation_name(Aggregation agg) noexcept;
Aggregation parse_aggregation(std::string_view name);

/// Ridge added to the covariance diagonal: ridge * trace / D, or plain `ridge`
/// when the trace is zero (all training rows identical).
template <typename Scalar>
Scalar ridge_offset(Scalar trace, Eigen::Index dim, Scalar ridge) {
  const Scalar scaled = ridge * trace / static_cast<Scalar>(dim);
  return scaled > Scalar(0) ? scaled : ridge;
}

/// Multivariate normal with a cached factor of the regularized covariance.
/// For `full` the factor is the lower Cholesky factor; for `diagonal` it holds
/// per-dimension standard deviations; for `spherical` a single standard deviation.
template <typename Scalar>
class GaussianModel {
 public:
  using VectorType = Vector<Scalar>;
  using MatrixType = Matrix<Scalar>;

  GaussianModel() = default;

  /// Regularizes `covariance` and factorizes it. `covariance` is D x D for
  /// full, D x 1 variances for diagonal, 1 x 1 pooled variance for spherical.
  static GaussianModel from_covariance(std::int64_t layer, CovarianceKind kind, VectorType mean,
                                       const MatrixType& covariance, Scalar ridge) {
    GaussianModel m;
    m.layer_ = layer;
    m.kind_ = kind;
    m.mean_ = std::move(mean);
    m.ridge_ = ridge;
    const auto dim = m.mean_.size();
    switch (kind) {
      case CovarianceKind::full: {
        if (covariance.rows() != dim || covariance.cols() != dim) {
          throw Error(ErrorCategory::shape, "full covariance must be D x D");
        }
        MatrixType reg = covariance;
        reg.diagonal().array() += ridge_offset(covariance.trace(), dim, ridge);
        Eigen::LLT<MatrixType> llt(reg);
        if (llt.info() != Eigen::Success) {
          throw Error(ErrorCategory::numeric,
                      "covariance is not positive definite after ridge " + std::to_string(ridge) +
                          "; retry with a larger ridge");
        }
        m.chol_ = llt.matrixL();
        m.log_det_ = Scalar(2) * m.chol_.diagonal().array().log().sum();
        break;
      }
      case CovarianceKind::diagonal: {
        if (covariance.size() != dim) throw Error(ErrorCategory::shape, "diagonal covariance must have D entries");
        VectorType var = covariance.reshaped();
        var.array() += ridge_offset(var.sum(), dim, ridge);
        if (!(var.minCoeff() > Scalar(0))) {
          throw Error(ErrorCategory::numeric, "nonpositive variance after ridge; retry with a larger ridge");
        }
        m.scale_ = var.array().sqrt();
        m.log_det_ = var.array().log().sum();
        break;
      }
      case CovarianceKind::spherical: {
        if (covariance.size() != 1) throw Error(ErrorCategory::shape, "spherical covariance must be a scalar");
        const Scalar pooled = covariance(0, 0);
        const Scalar var = pooled + ridge_offset(pooled * static_cast<Scalar>(dim), dim, ridge);
        if (!(var > Scalar(0))) {
          throw Error(ErrorCategory::numeric, "nonpositive variance after ridge; retry with a larger ridge");
        }
        m.scale_ = VectorType::Constant(1, std::sqrt(var));
        m.log_det_ = static_cast<Scalar>(dim) * std::log(var);
        break;
      }
    }
    return m;
  }

  /// Rebuilds a model from a stored factor (see class comment for its shape).
  static GaussianModel from_factor(std::int64_t layer, CovarianceKind kind, VectorType mean,
                                   const MatrixType& factor, Scalar ridge) {
    GaussianModel m;
    m.layer_ = layer;
    m.kind_ = kind;
    m.mean_ = std::move(mean);
    m.ridge_ = ridge;
    const auto dim = m.mean_.size();
    if (kind == CovarianceKind::full) {
      if (factor.rows() != dim || factor.cols() != dim) throw Error(ErrorCategory::shape, "factor must be D x D");
      m.chol_ = factor.template triangularView<Eigen::Lower>();
      if (!(m.chol_.diagonal().minCoeff() > Scalar(0))) {
        throw Error(ErrorCategory::numeric, "factor has a nonpositive diagonal");
      }
      m.log_det_ = Scalar(2) * m.chol_.diagonal().array().log().sum();
    } else {
      const Eigen::Index expected = kind == CovarianceKind::diagonal ? dim : 1;
      if (factor.size() != expected) throw Error(ErrorCategory::shape, "factor has the wrong size");
      m.scale_ = factor.reshaped();
      if (!(m.scale_.minCoeff() > Scalar(0))) throw Error(ErrorCategory::numeric, "nonpositive scale");
      m.log_det_ = kind == CovarianceKind::diagonal
                       ? Scalar(2) * m.scale_.array().log().sum()
                       : Scalar(2) * static_cast<Scalar>(dim) * std::log(m.scale_(0));
    }
    return m;
  }

  std::int64_t layer() const noexcept { return layer_; }
  CovarianceKind kind() const noexcept { return kind_; }
  Eigen::Index dim() const noexcept { return mean_.size(); }
  const VectorType& mean() const noexcept { return mean_; }
  Scalar log_det() const noexcept { return log_det_; }
  Scalar ridge() const noexcept { return ridge_; }

  /// Compact factor as stored: D x D, D x 1 or 1 x 1.
  MatrixType factor() const {
    if (kind_ == CovarianceKind::full) return chol_;
    return scale_;
  }

  /// Dense lower-triangular L with L L^T equal to the regularized covariance.
  MatrixType cholesky_factor() const {
    switch (kind_) {
      case CovarianceKind::full: return chol_;
      case CovarianceKind::diagonal: return scale_.asDiagonal();
      case CovarianceKind::spherical: return MatrixType::Identity(dim(), dim()) * scale_(0);
    }
    return {};
  }

  /// Dense regularized covariance.
  MatrixType covariance() const {
    const MatrixType l = cholesky_factor();
    return l * l.transpose();
  }

  /// Squared Mahalanobis distance of each column of `centered` (D x n), via
  /// triangular solves against the cached factor.
  VectorType mahalanobis_sq_columns(const MatrixType& centered) const {
    switch (kind_) {
      case CovarianceKind::full:
        return chol_.template triangularView<Eigen::Lower>().solve(centered).colwise().squaredNorm().transpose();
      case CovarianceKind::diagonal:
        return (centered.array().colwise() / scale_.array()).matrix().colwise().squaredNorm().transpose();
      case CovarianceKind::spherical:
        return centered.colwise().squaredNorm().transpose() / (scale_(0) * scale_(0));
    }
    return {};
  }

  /// 0.5 * D * log(2 pi) + 0.5 * log_det.
  Scalar surprisal_offset() const noexcept {
    return Scalar(0.5) * static_cast<Scalar>(dim()) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>) +
           Scalar(0.5) * log_det_;
  }

 private:
  std::int64_t layer_ = -1;
  CovarianceKind kind_ = CovarianceKind::full;
  VectorType mean_;
  MatrixType chol_;
  VectorType scale_;
  Scalar log_det_ = 0;
  Scalar ridge_ = 0;
};

using GaussianModeld = GaussianModel<double>;

/// Maximum-likelihood fit (denominator N) of the chosen covariance kind to the
/// rows of `data`, regularized by ridge * trace / D on the diagonal.
template <typename Scalar = double, typename Derived>
GaussianModel<Scalar> fit_gaussian(const Eigen::MatrixBase<Derived>& data, CovarianceKind kind,
                                   Scalar ridge = Scalar(1e-6), std::int64_t layer = -1) {
  const auto n = data.rows();
  const auto dim = data.cols();
  if (n < 2) throw Error(ErrorCategory::validation, "fit_gaussian: need at least 2 rows, got " + std::to_string(n));
  const Matrix<Scalar> x = data.template cast<Scalar>();
  Vector<Scalar> mean = x.colwise().mean().transpose();
  const Matrix<Scalar> centered = x.rowwise() - mean.transpose();
  const auto inv_n = Scalar(1) / static_cast<Scalar>(n);
  switch (kind) {
    case CovarianceKind::full: {
      Matrix<Scalar> cov = Matrix<Scalar>::Zero(dim, dim);
      cov.template selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), inv_n);
      cov = cov.template selfadjointView<Eigen::Lower>();
      return GaussianModel<Scalar>::from_covariance(layer, kind, std::move(mean), cov, ridge);
    }
    case CovarianceKind::diagonal: {
      const Matrix<Scalar> var = centered.colwise().squaredNorm().transpose() * inv_n;
      return GaussianModel<Scalar>::from_covariance(layer, kind, std::move(mean), var, ridge);
    }
    case CovarianceKind::spherical: {
      Matrix<Scalar> pooled(1, 1);
      pooled(0, 0) = centered.squaredNorm() * inv_n / static_cast<Scalar>(dim);
      return GaussianModel<Scalar>::from_covariance(layer, kind, std::move(mean), pooled, ridge);
    }
  }
  throw Error(ErrorCategory::validation, "fit_gaussian: unknown covariance kind");
}

template <typename Scalar, typename Derived>
void check_query(const GaussianModel<Scalar>& model, const Eigen::MatrixBase<Derived>& vector) {
  if (vector.size() != model.dim()) {
    throw Error(ErrorCategory::shape, "query has dimension " + std::to_string(vector.size()) +
                                          ", model has " + std::to_string(model.dim()));
  }
}

/// (y - mu)^T Sigma^-1 (y - mu) by triangular solve; never forms an inverse.
template <typename Scalar, typename Derived>
Scalar mahalanobis_sq(const GaussianModel<Scalar>& model, const Eigen::MatrixBase<Derived>& vector) {
  check_query(model, vector);
  const Matrix<Scalar> centered = vector.reshaped().template cast<Scalar>() - model.mean();
  return std::max(Scalar(0), model.mahalanobis_sq_columns(centered)(0));
}

/// Negative log density: 0.5 d^2 + 0.5 D log(2 pi) + 0.5 log|Sigma|.
template <typename Scalar, typename Derived>
Scalar token_surprisal(const GaussianModel<Scalar>& model, const Eigen::MatrixBase<Derived>& vector) {
  return Scalar(0.5) * mahalanobis_sq(model, vector) + model.surprisal_offset();
}

/// Surprisal of every row of `rows` (n x D).
template <typename Scalar, typename Derived>
Vector<Scalar> token_surprisals(const GaussianModel<Scalar>& model, const Eigen::MatrixBase<Derived>& rows) {
  if (rows.cols() != model.dim()) {
    throw Error(ErrorCategory::shape, "rows have dimension " + std::to_string(rows.cols()) +
                                          ", model has " + std::to_string(model.dim()));
  }
  const Matrix<Scalar> centered = (rows.template cast<Scalar>().rowwise() - model.mean().transpose()).transpose();
  Vector<Scalar> d2 = model.mahalanobis_sq_columns(centered).cwiseMax(Scalar(0));
  return (Scalar(0.5) * d2.array() + model.surprisal_offset()).matrix();
}

template <typename Scalar>
Scalar aggregate(const Vector<Scalar>& token_values, Aggregation agg) {
  if (token_values.size() == 0) throw Error(ErrorCategory::empty, "sentence has no tokens");
  return agg == Aggregation::sum ? token_values.sum() : token_values.maxCoeff();
}

/// Sum or max of token surprisals over the rows of one sentence.
template <typename Scalar, typename Derived>
Scalar sentence_surprisal(const GaussianModel<Scalar>& model, const Eigen::MatrixBase<Derived>& rows,
                          Aggregation agg) {
  if (rows.rows() == 0) throw Error(ErrorCategory::empty, "sentence has no tokens");
  return aggregate<Scalar>(token_surprisals(model, rows), agg);
}

}  // namespace layerlens::gauss
