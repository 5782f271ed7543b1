#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "layerlens/gauss/gaussian.hpp"
#include "layerlens/rng.hpp"

namespace layerlens::gauss {

template <typename Scalar>
struct GmmComponent {
  Scalar weight = 0;
  GaussianModel<Scalar> gaussian;
};

template <typename Scalar>
struct GmmModel {
  std::vector<GmmComponent<Scalar>> components;
  bool converged = false;
  double final_loglik = 0.0;
  /// Total data log-likelihood before each M-step, then after the last one.
  std::vector<double> loglik_trace;
  /// Iteration numbers at which an empty component was reseeded.
  std::vector<int> reseeded_at;
  std::vector<std::string> diagnostics;

  int k() const noexcept { return static_cast<int>(components.size()); }
};

struct GmmOptions {
  int max_iter = 200;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  double ridge = 1e-6;
  std::int64_t layer = -1;
};

namespace detail {

/// Row i, column j: log w_j + log N(x_i; mu_j, Sigma_j).
template <typename Scalar>
Matrix<Scalar> weighted_log_densities(const std::vector<GmmComponent<Scalar>>& comps, const Matrix<Scalar>& x) {
  Matrix<Scalar> out(x.rows(), static_cast<Eigen::Index>(comps.size()));
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const auto& g = comps[j].gaussian;
    const Matrix<Scalar> centered = (x.rowwise() - g.mean().transpose()).transpose();
    out.col(static_cast<Eigen::Index>(j)) =
        (std::log(comps[j].weight) - g.surprisal_offset() -
         Scalar(0.5) * g.mahalanobis_sq_columns(centered).array()).matrix();
  }
  return out;
}

template <typename Scalar>
Vector<Scalar> log_sum_exp_rows(const Matrix<Scalar>& m) {
  const Vector<Scalar> peak = m.rowwise().maxCoeff();
  return peak.array() + (m.colwise() - peak).array().exp().rowwise().sum().log();
}

/// tr(Sigma^-1 S) via two triangular solves against the Cholesky factor.
template <typename Scalar>
Scalar trace_inverse_product(const GaussianModel<Scalar>& g, const Matrix<Scalar>& scatter) {
  const Matrix<Scalar> l = g.cholesky_factor();
  const auto tri = l.template triangularView<Eigen::Lower>();
  const Matrix<Scalar> a = tri.solve(scatter);
  const Matrix<Scalar> b = tri.solve(a.transpose());
  return b.trace();
}

/// Expected complete-data log-likelihood contribution of one component's
/// covariance, up to terms that do not depend on it.
template <typename Scalar>
Scalar covariance_objective(const GaussianModel<Scalar>& g, const Matrix<Scalar>& scatter) {
  return -(g.log_det() + trace_inverse_product(g, scatter));
}

/// Seeded k-means++ center selection.
template <typename Scalar>
std::vector<Eigen::Index> kmeanspp_centers(const Matrix<Scalar>& x, int k, Rng& rng) {
  const auto n = x.rows();
  std::vector<Eigen::Index> centers;
  centers.push_back(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n))));
  Vector<Scalar> d2 = (x.rowwise() - x.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < k) {
    const Scalar total = d2.sum();
    Eigen::Index pick = 0;
    if (total > Scalar(0)) {
      const Scalar target = static_cast<Scalar>(uniform_unit(rng)) * total;
      Scalar acc = 0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > target && d2(i) > Scalar(0)) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
    }
    centers.push_back(pick);
    d2 = d2.cwiseMin((x.rowwise() - x.row(pick)).rowwise().squaredNorm());
  }
  return centers;
}

}  // namespace detail

/// Expectation-maximization for a k-component full-covariance mixture.
///
/// Means start at seeded k-means++ centers with the global covariance and equal
/// weights. Each M-step keeps the previous covariance of a component when the
/// ridge-regularized update would lower the expected complete-data
/// log-likelihood, so the data log-likelihood never decreases (a generalized EM
/// step). Converges when the relative log-likelihood improvement drops below
/// `tol`. A component whose responsibility mass vanishes is reseeded at the
/// point with the highest surprisal under the current mixture.
template <typename Scalar = double, typename Derived>
GmmModel<Scalar> fit_gmm(const Eigen::MatrixBase<Derived>& data, int k, const GmmOptions& opt = {}) {
  const auto n = data.rows();
  if (k < 1) throw Error(ErrorCategory::validation, "fit_gmm: k must be >= 1");
  if (n < k || n < 2) throw Error(ErrorCategory::validation, "fit_gmm: need N >= k and N >= 2");
  const Matrix<Scalar> x = data.template cast<Scalar>();
  const auto ridge = static_cast<Scalar>(opt.ridge);

  const auto global = fit_gaussian<Scalar>(x, CovarianceKind::full, ridge, opt.layer);
  const Matrix<Scalar> global_cov = [&] {
    const Matrix<Scalar> centered = x.rowwise() - global.mean().transpose();
    return Matrix<Scalar>((centered.transpose() * centered) / static_cast<Scalar>(n));
  }();

  Rng rng(opt.seed);
  GmmModel<Scalar> model;
  for (auto c : detail::kmeanspp_centers(x, k, rng)) {
    model.components.push_back({Scalar(1) / static_cast<Scalar>(k),
                                GaussianModel<Scalar>::from_covariance(opt.layer, CovarianceKind::full,
                                                                       x.row(c).transpose(), global_cov, ridge)});
  }

  const Scalar empty_mass = std::max(Scalar(1e-10) * static_cast<Scalar>(n), std::numeric_limits<Scalar>::min());
  double previous = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    // E-step
    const Matrix<Scalar> logp = detail::weighted_log_densities(model.components, x);
    const Vector<Scalar> log_norm = detail::log_sum_exp_rows(logp);
    const double loglik = static_cast<double>(log_norm.sum());
    model.loglik_trace.push_back(loglik);
    if (iter > 0 && std::abs(loglik - previous) <= opt.tol * std::abs(previous)) {
      model.converged = true;
      break;
    }
    previous = loglik;
    const Matrix<Scalar> resp = (logp.colwise() - log_norm).array().exp();

    // M-step
    std::vector<GmmComponent<Scalar>> next;
    bool reseeded = false;
    for (int j = 0; j < k; ++j) {
      const Vector<Scalar> r = resp.col(j);
      const Scalar mass = r.sum();
      if (!(mass > empty_mass)) {
        Eigen::Index worst = 0;
        log_norm.minCoeff(&worst);
        next.push_back({Scalar(1) / static_cast<Scalar>(n),
                        GaussianModel<Scalar>::from_covariance(opt.layer, CovarianceKind::full,
                                                               x.row(worst).transpose(), global_cov, ridge)});
        model.diagnostics.push_back("iteration " + std::to_string(iter) + ": component " +
                                    std::to_string(j) + " empty, reseeded at row " + std::to_string(worst));
        reseeded = true;
        continue;
      }
      Vector<Scalar> mean = (x.transpose() * r) / mass;
      const Matrix<Scalar> centered = x.rowwise() - mean.transpose();
      const Matrix<Scalar> scatter = (centered.transpose() * r.asDiagonal() * centered) / mass;
      auto candidate = GaussianModel<Scalar>::from_covariance(opt.layer, CovarianceKind::full, mean, scatter, ridge);
      const auto& old = model.components[static_cast<std::size_t>(j)].gaussian;
      if (detail::covariance_objective(candidate, scatter) < detail::covariance_objective(old, scatter)) {
        candidate = GaussianModel<Scalar>::from_factor(opt.layer, CovarianceKind::full, std::move(mean),
                                                       old.cholesky_factor(), old.ridge());
      }
      next.push_back({mass / static_cast<Scalar>(n), std::move(candidate)});
    }
    if (reseeded) {
      model.reseeded_at.push_back(iter);
      Scalar total = 0;
      for (const auto& c : next) total += c.weight;
      for (auto& c : next) c.weight /= total;
    }
    model.components = std::move(next);
  }

  if (!model.converged) {
    const Matrix<Scalar> logp = detail::weighted_log_densities(model.components, x);
    const double loglik = static_cast<double>(detail::log_sum_exp_rows(logp).sum());
    model.loglik_trace.push_back(loglik);
    model.converged = std::abs(loglik - previous) <= opt.tol * std::abs(previous);
  }
  model.final_loglik = model.loglik_trace.back();
  return model;
}

/// -log sum_j w_j N(y; mu_j, Sigma_j) for each row.
template <typename Scalar, typename Derived>
Vector<Scalar> token_surprisals(const GmmModel<Scalar>& model, const Eigen::MatrixBase<Derived>& rows) {
  if (model.components.empty()) throw Error(ErrorCategory::validation, "empty mixture");
  if (rows.cols() != model.components.front().gaussian.dim()) {
    throw Error(ErrorCategory::shape, "rows have dimension " + std::to_string(rows.cols()) +
                                          ", mixture has " +
                                          std::to_string(model.components.front().gaussian.dim()));
  }
  const Matrix<Scalar> x = rows.template cast<Scalar>();
  return -detail::log_sum_exp_rows(detail::weighted_log_densities(model.components, x));
}

template <typename Scalar, typename Derived>
Scalar token_surprisal(const GmmModel<Scalar>& model, const Eigen::MatrixBase<Derived>& vector) {
  return token_surprisals(model, vector.reshaped().transpose())(0);
}

template <typename Scalar, typename Derived>
Scalar sentence_surprisal(const GmmModel<Scalar>& model, const Eigen::MatrixBase<Derived>& rows, Aggregation agg) {
  if (rows.rows() == 0) throw Error(ErrorCategory::empty, "sentence has no tokens");
  return aggregate<Scalar>(token_surprisals(model, rows), agg);
}

}  // namespace layerlens::gauss
