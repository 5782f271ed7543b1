#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "layerlens/error.hpp"
#include "layerlens/gauss/anomaly.hpp"
#include "layerlens/gauss/gaussian.hpp"
#include "layerlens/gauss/gmm.hpp"
#include "layerlens/gauss/model_io.hpp"

using namespace layerlens;
using namespace layerlens::gauss;

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

MatrixXd gaussian_sample(std::mt19937_64& rng, Eigen::Index n, const VectorXd& mu, const MatrixXd& cov) {
  const MatrixXd l = cov.llt().matrixL();
  std::normal_distribution<double> g;
  MatrixXd z(n, mu.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = g(rng);
  return (z * l.transpose()).rowwise() + mu.transpose();
}

MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> g;
  MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = g(rng);
  return a * a.transpose() + MatrixXd::Identity(d, d) * 0.5;
}

// Log density through the explicit inverse and determinant.
double dense_surprisal(const MatrixXd& cov, const VectorXd& mu, const VectorXd& y) {
  const VectorXd c = y - mu;
  const double d2 = c.dot(cov.inverse() * c);
  return 0.5 * d2 + 0.5 * static_cast<double>(mu.size()) * kLog2Pi + 0.5 * std::log(cov.determinant());
}

EmbeddingArchive pair_archive(const std::vector<std::pair<float, float>>& values, bool identical = false) {
  EmbeddingArchive a("toy", 1, 1);
  int id = 0;
  for (const auto& [control, anomalous] : values) {
    const std::string pid = std::to_string(id++);
    a.add_sentence("c" + pid, {{"x", 0, {}, {}, {}}},
                   {{"task", "agr"}, {"anomaly_type", "morphosyntactic"}, {"pair_id", pid}, {"condition", "control"}},
                   std::vector<float>{control});
    a.add_sentence("a" + pid, {{"x", 0, {}, {}, {}}},
                   {{"task", "agr"}, {"anomaly_type", "morphosyntactic"}, {"pair_id", pid}, {"condition", "anomalous"}},
                   std::vector<float>{identical ? control : anomalous});
  }
  return a;
}

}  // namespace

TEST_CASE("fit_gaussian examples") {
  MatrixXd x(2, 1);
  x << 0, 2;
  const auto m = fit_gaussian(x, CovarianceKind::full, 0.0);
  CHECK(m.mean()(0) == doctest::Approx(1.0));
  CHECK(m.covariance()(0, 0) == doctest::Approx(1.0));
  CHECK(token_surprisal(m, Eigen::VectorXd::Constant(1, 1.0)) == doctest::Approx(0.5 * kLog2Pi));
  CHECK(0.5 * kLog2Pi == doctest::Approx(0.9189385));

  const MatrixXd copies = MatrixXd::Constant(5, 3, 4.0);
  for (auto kind : {CovarianceKind::full, CovarianceKind::diagonal, CovarianceKind::spherical}) {
    const auto d = fit_gaussian(copies, kind);
    CHECK(std::isfinite(token_surprisal(d, Eigen::Vector3d(4, 4, 4))));
    CHECK(std::isfinite(token_surprisal(d, Eigen::Vector3d(5, 4, 4))));
  }
  CHECK_THROWS_AS(fit_gaussian(MatrixXd(1, 3), CovarianceKind::full), Error);
}

TEST_CASE("spherical fit recovers isotropic variance") {
  std::mt19937_64 rng(5);
  const auto x = gaussian_sample(rng, 10000, VectorXd::Zero(8), MatrixXd::Identity(8, 8) * 4.0);
  const auto m = fit_gaussian(x, CovarianceKind::spherical);
  CHECK(std::fabs(m.covariance()(0, 0) - 4.0) < 0.2);
  CHECK(m.covariance().isDiagonal());
}

TEST_CASE("mahalanobis against the dense inverse") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const MatrixXd cov = random_spd(rng, 5);
    const VectorXd mu = VectorXd::NullaryExpr(5, [&] { return g(rng); });
    const auto model = fit_gaussian(gaussian_sample(rng, 200, mu, cov), CovarianceKind::full);
    const MatrixXd reg = model.covariance();
    const VectorXd y = VectorXd::NullaryExpr(5, [&] { return 3.0 * g(rng); });
    const VectorXd c = y - model.mean();
    CHECK(std::fabs(mahalanobis_sq(model, y) - c.dot(reg.inverse() * c)) < 1e-8 * std::max(1.0, c.squaredNorm()));
    CHECK(token_surprisal(model, y) == doctest::Approx(dense_surprisal(reg, model.mean(), y)).epsilon(1e-9));
    CHECK(mahalanobis_sq(model, model.mean()) == 0.0);
  }
  const auto unit = GaussianModeld::from_covariance(0, CovarianceKind::full, VectorXd::Zero(3), MatrixXd::Identity(3, 3), 0.0);
  CHECK(mahalanobis_sq(unit, Eigen::Vector3d(1, 2, 2)) == doctest::Approx(9.0));
  CHECK_THROWS_AS(mahalanobis_sq(unit, Eigen::Vector2d(1, 2)), Error);
}

TEST_CASE("Mahalanobis identity for every covariance kind") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (auto kind : {CovarianceKind::full, CovarianceKind::diagonal, CovarianceKind::spherical}) {
    const auto model = fit_gaussian(gaussian_sample(rng, 300, VectorXd::Ones(6), random_spd(rng, 6)), kind);
    const MatrixXd l = model.cholesky_factor();
    CHECK(model.log_det() == doctest::Approx(2.0 * l.diagonal().array().log().sum()));
    for (int i = 0; i < 20; ++i) {
      const VectorXd y = VectorXd::NullaryExpr(6, [&] { return 2.0 * g(rng); });
      const double lhs = token_surprisal(model, y) - (0.5 * 6 * kLog2Pi + 0.5 * model.log_det());
      CHECK(std::fabs(lhs - 0.5 * mahalanobis_sq(model, y)) < 1e-8);
    }
    CHECK(token_surprisal(model, model.mean()) == doctest::Approx(0.5 * 6 * kLog2Pi + 0.5 * model.log_det()));
  }
}

TEST_CASE("surprisal is translation invariant and Mahalanobis is linear-map invariant") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  const MatrixXd x = gaussian_sample(rng, 500, VectorXd::Zero(4), random_spd(rng, 4));
  const Eigen::RowVectorXd shift = Eigen::RowVectorXd::LinSpaced(4, -20, 30);
  const auto base = fit_gaussian(x, CovarianceKind::full);
  const auto moved = fit_gaussian(MatrixXd(x.rowwise() + shift), CovarianceKind::full);
  MatrixXd a = MatrixXd::Identity(4, 4) * 2.0;
  a(0, 1) = 0.5;
  a(2, 3) = -0.3;
  const auto mapped = fit_gaussian(MatrixXd(x * a.transpose()), CovarianceKind::full, 0.0);
  const auto unridged = fit_gaussian(x, CovarianceKind::full, 0.0);
  for (int i = 0; i < 20; ++i) {
    const VectorXd y = VectorXd::NullaryExpr(4, [&] { return g(rng); });
    CHECK(std::fabs(token_surprisal(base, y) - token_surprisal(moved, VectorXd(y + shift.transpose()))) < 1e-8);
    CHECK(std::fabs(mahalanobis_sq(unridged, y) - mahalanobis_sq(mapped, VectorXd(a * y))) < 1e-6);
  }
}

TEST_CASE("sentence_surprisal aggregation") {
  const auto m = GaussianModeld::from_covariance(0, CovarianceKind::full, VectorXd::Zero(1), MatrixXd::Identity(1, 1), 0.0);
  MatrixXd one(1, 1);
  one << 0.7;
  CHECK(sentence_surprisal(m, one, Aggregation::sum) == doctest::Approx(token_surprisal(m, one.row(0))));
  MatrixXd two(2, 1);
  two << 0.5, -2.0;
  CHECK(sentence_surprisal(m, two, Aggregation::sum) ==
        doctest::Approx(token_surprisal(m, two.row(0)) + token_surprisal(m, two.row(1))));
  CHECK(sentence_surprisal(m, two, Aggregation::max) == doctest::Approx(token_surprisal(m, two.row(1))));
  VectorXd v(3);
  v << 3.0, 7.5, 1.2;
  CHECK(aggregate<double>(v, Aggregation::max) == 7.5);
  CHECK_THROWS_AS(sentence_surprisal(m, MatrixXd(0, 1), Aggregation::sum), Error);
}

TEST_CASE("GMM with one component reduces to a Gaussian") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  const MatrixXd x = gaussian_sample(rng, 400, VectorXd::Ones(3), random_spd(rng, 3));
  const auto single = fit_gaussian(x, CovarianceKind::full);
  const auto mix = fit_gmm(x, 1, GmmOptions{});
  CHECK(mix.components[0].weight == doctest::Approx(1.0));
  for (int i = 0; i < 100; ++i) {
    const VectorXd y = VectorXd::NullaryExpr(3, [&] { return 2.0 * g(rng); });
    CHECK(std::fabs(token_surprisal(mix, y) - token_surprisal(single, y)) < 1e-6);
  }
}

TEST_CASE("GMM recovers two separated clusters with monotone likelihood") {
  std::mt19937_64 rng(10);
  const VectorXd c0 = VectorXd::Constant(2, -5.0), c1 = VectorXd::Constant(2, 5.0);
  MatrixXd x(2000, 2);
  x.topRows(1000) = gaussian_sample(rng, 1000, c0, MatrixXd::Identity(2, 2));
  x.bottomRows(1000) = gaussian_sample(rng, 1000, c1, MatrixXd::Identity(2, 2));
  GmmOptions opt;
  opt.seed = 3;
  const auto mix = fit_gmm(x, 2, opt);
  REQUIRE(mix.k() == 2);
  const auto& a = mix.components[0].gaussian.mean()(0) < 0 ? mix.components[0] : mix.components[1];
  const auto& b = mix.components[0].gaussian.mean()(0) < 0 ? mix.components[1] : mix.components[0];
  CHECK((a.gaussian.mean() - c0).cwiseAbs().maxCoeff() < 0.1);
  CHECK((b.gaussian.mean() - c1).cwiseAbs().maxCoeff() < 0.1);
  CHECK(std::fabs(a.weight - 0.5) < 0.05);
  CHECK(a.weight + b.weight == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 1; i < mix.loglik_trace.size(); ++i) {
    CHECK(mix.loglik_trace[i] >= mix.loglik_trace[i - 1] - 1e-9);
  }
  CHECK(mix.converged);
  const auto again = fit_gmm(x, 2, opt);
  CHECK(again.final_loglik == mix.final_loglik);
}

TEST_CASE("GMM argument checks") {
  const MatrixXd x = MatrixXd::Random(3, 2);
  CHECK_THROWS_AS(fit_gmm(x, 0), Error);
  CHECK_THROWS_AS(fit_gmm(x, 4), Error);
}

TEST_CASE("minimal_pair_eval and surprisal gap on synthetic pairs") {
  const auto model = GaussianModeld::from_covariance(0, CovarianceKind::full, VectorXd::Zero(1), MatrixXd::Identity(1, 1), 0.0);
  SUBCASE("anomalous far from the training mean") {
    const auto archive = pair_archive({{0.1f, 9.0f}, {-0.2f, -8.0f}, {0.0f, 10.0f}});
    const auto sets = paired_datasets(archive);
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].task == "agr");
    CHECK(sets[0].pairs.size() == 3);
    CHECK(minimal_pair_eval(model, sets[0], archive, 0, Aggregation::sum) == 1.0);
    const std::vector<GaussianModeld> layers{model};
    const auto gap = surprisal_gap(std::span<const GaussianModeld>(layers), sets[0], archive);
    REQUIRE(gap.per_layer_gap.size() == 1);
    CHECK(*gap.per_layer_gap[0] > 0.0);
  }
  SUBCASE("identical members tie and count as wrong") {
    const auto archive = pair_archive({{0.1f, 0.0f}, {1.0f, 0.0f}}, true);
    const auto sets = paired_datasets(archive);
    CHECK(minimal_pair_eval(model, sets[0], archive, 0, Aggregation::sum) == 0.0);
    const std::vector<GaussianModeld> layers{model};
    const auto gap = surprisal_gap(std::span<const GaussianModeld>(layers), sets[0], archive);
    CHECK_FALSE(gap.per_layer_gap[0].has_value());
    CHECK_FALSE(gap.diagnostics.empty());
  }
  SUBCASE("missing pair member") {
    EmbeddingArchive a("toy", 1, 1);
    a.add_sentence("c", {{"x", 0, {}, {}, {}}},
                   {{"task", "t"}, {"anomaly_type", "semantic"}, {"pair_id", "1"}, {"condition", "control"}},
                   std::vector<float>{0.0f});
    try {
      paired_datasets(a);
      FAIL("expected lookup error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::lookup);
    }
  }
}

TEST_CASE("pair accuracy is invariant under monotone transforms") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> ctrl(20), anom(20), d1, d2;
    for (int k = 0; k < 20; ++k) {
      ctrl[k] = g(rng);
      anom[k] = g(rng);
      d1.push_back(anom[k] - ctrl[k]);
      d2.push_back(std::exp(3 * anom[k]) - std::exp(3 * ctrl[k]));
    }
    CHECK(pair_accuracy(d1) == pair_accuracy(d2));
  }
}

TEST_CASE("surprisal_gap on raw differences") {
  const std::vector<double> d{0.0, 2.0};
  CHECK(surprisal_gap(d) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(surprisal_gap(std::vector<double>{0, 0, 0}), DegenerateError);
  CHECK_THROWS_AS(surprisal_gap(std::vector<double>{1.5, 1.5, 1.5}), DegenerateError);
}

TEST_CASE("mlm accuracy and frequency correlation") {
  const std::vector<MlmScore> s{{"1", -1.0, -2.0}, {"2", -3.0, -2.0}, {"3", -1.0, -1.0}, {"4", 0.0, -5.0}};
  CHECK(mlm_accuracy(s) == doctest::Approx(0.5));
  const std::vector<double> x{1, 2, 3, 4, 5}, neg{-1, -2, -3, -4, -5}, affine{5, 7, 9, 11, 13};
  CHECK(frequency_correlation(x, neg) == doctest::Approx(-1.0));
  CHECK(frequency_correlation(x, affine) == doctest::Approx(1.0));
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  std::vector<double> a(10000), b(10000);
  for (auto& v : a) v = g(rng);
  for (auto& v : b) v = g(rng);
  CHECK(std::fabs(frequency_correlation(a, b)) < 0.05);
  CHECK_THROWS_AS(frequency_correlation(x, std::vector<double>(5, 1.0)), Error);
}

TEST_CASE("Gaussian model serialization round-trips") {
  std::mt19937_64 rng(13);
  for (auto kind : {CovarianceKind::full, CovarianceKind::diagonal, CovarianceKind::spherical}) {
    const auto m = fit_gaussian(gaussian_sample(rng, 50, VectorXd::Ones(4), random_spd(rng, 4)), kind, 1e-6, 3);
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    write_gaussian(m, buf);
    const auto back = read_gaussian(buf);
    CHECK(back.layer() == 3);
    CHECK(back.kind() == kind);
    CHECK(back.mean().isApprox(m.mean(), 1e-6));
    CHECK(back.log_det() == doctest::Approx(m.log_det()).epsilon(1e-5));
    const VectorXd y = VectorXd::Constant(4, 0.3);
    CHECK(token_surprisal(back, y) == doctest::Approx(token_surprisal(m, y)).epsilon(1e-5));
  }
  std::stringstream junk("NOPE");
  CHECK_THROWS_AS(read_gaussian(junk), FormatError);
}

TEST_CASE("GMM serialization round-trips") {
  std::mt19937_64 rng(14);
  const auto x = gaussian_sample(rng, 300, VectorXd::Zero(2), MatrixXd::Identity(2, 2));
  const auto mix = fit_gmm(x, 3);
  const auto path = std::string("/tmp/layerlens_gmm_roundtrip.json");
  save_gmm(mix, path);
  const auto back = load_gmm(path);
  REQUIRE(back.k() == 3);
  const Eigen::Vector2d y(0.4, -1.0);
  CHECK(token_surprisal(back, y) == doctest::Approx(token_surprisal(mix, y)).epsilon(1e-12));
}

TEST_CASE("kind and aggregation names") {
  CHECK(parse_kind("diag") == CovarianceKind::diagonal);
  CHECK(kind_name(parse_kind("spherical")) == "spherical");
  CHECK(parse_aggregation("max") == Aggregation::max);
  CHECK_THROWS_AS(parse_kind("banded"), Error);
}
