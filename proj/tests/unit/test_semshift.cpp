#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "layerlens/error.hpp"
#include "layerlens/semshift.hpp"

using namespace layerlens;
using namespace layerlens::semshift;

namespace {

MatrixXd random_rows(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d, double offset = 0.0) {
  std::normal_distribution<double> g(offset, 1.0);
  MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = g(rng);
  return m;
}

LemmaSemantics lemma(Dominance dom, double shift, double nvar, double vvar) {
  LemmaSemantics s;
  s.dominant = dom;
  s.shift = shift;
  s.noun_variation = nvar;
  s.verb_variation = vvar;
  return s;
}

}  // namespace

TEST_CASE("prototype_vector") {
  MatrixXd rows(2, 2);
  rows << 0, 0, 2, 0;
  CHECK(prototype_vector(rows).isApprox(Eigen::Vector2d(1, 0)));
  const Eigen::RowVector3d single(1.5, -2, 3);
  CHECK(prototype_vector(single) == single.transpose());
  CHECK_THROWS_AS(prototype_vector(MatrixXd(0, 3)), Error);

  std::mt19937_64 rng(1);
  const auto big = random_rows(rng, 100, 6);
  for (Eigen::Index c = 0; c < 6; ++c) {
    double sum = 0;
    for (Eigen::Index r = 0; r < 100; ++r) sum += big(r, c);
    CHECK(std::fabs(prototype_vector(big)(c) - sum / 100.0) < 1e-12);
  }
}

TEST_CASE("variation") {
  MatrixXd rows(2, 2);
  rows << 0, 0, 2, 0;
  CHECK(variation(rows) == doctest::Approx(1.0));
  CHECK(variation(MatrixXd::Constant(5, 3, 2.5)) == 0.0);

  std::mt19937_64 rng(2);
  const auto m = random_rows(rng, 40, 5);
  CHECK(variation(MatrixXd(-3.0 * m)) == doctest::Approx(3.0 * variation(m)));
  const Eigen::RowVectorXd shift = Eigen::RowVectorXd::Constant(5, 11.0);
  CHECK(variation(MatrixXd(m.rowwise() + shift)) == doctest::Approx(variation(m)).epsilon(1e-12));
  CHECK_THROWS_AS(variation(MatrixXd(0, 2)), Error);
}

TEST_CASE("cosine_distance") {
  CHECK(cosine_distance(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)) == doctest::Approx(1.0));
  CHECK(cosine_distance(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)) == doctest::Approx(0.0));
  CHECK(cosine_distance(Eigen::Vector2d(1, 2), Eigen::Vector2d(-2, -4)) == doctest::Approx(2.0));
  CHECK(cosine_distance(Eigen::Vector2d(1, 2), Eigen::Vector2d(5, 3)) ==
        doctest::Approx(cosine_distance(Eigen::Vector2d(7, 14), Eigen::Vector2d(0.5, 0.3))));
  CHECK_THROWS_AS(cosine_distance(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)), Error);
}

TEST_CASE("balanced_lemma_stats") {
  std::mt19937_64 rng(3);
  SUBCASE("equal counts: no downsampling") {
    LemmaInstanceSet s{7, random_rows(rng, 30, 4), random_rows(rng, 30, 4, 1.0)};
    const auto r = balanced_lemma_stats(s, 1);
    REQUIRE(r);
    CHECK(r->noun_variation == doctest::Approx(variation(s.noun_vectors)));
    CHECK(r->verb_variation == doctest::Approx(variation(s.verb_vectors)));
    CHECK(r->group_id == 7);
    CHECK(r->dominant == Dominance::tie);
  }
  SUBCASE("majority downsampled deterministically") {
    LemmaInstanceSet s{1, random_rows(rng, 100, 4), random_rows(rng, 30, 4)};
    const auto a = balanced_lemma_stats(s, 42);
    const auto b = balanced_lemma_stats(s, 42);
    const auto c = balanced_lemma_stats(s, 43);
    REQUIRE(a);
    CHECK(a->noun_variation == b->noun_variation);
    CHECK(a->verb_variation == c->verb_variation);
    CHECK(a->verb_variation == doctest::Approx(variation(s.verb_vectors)));
    CHECK(a->dominant == Dominance::noun);
    CHECK(a->noun_count == 100);
    CHECK(a->prototype_noun.isApprox(prototype_vector(s.noun_vectors)));
    CHECK(a->majority_variation() == a->noun_variation);
  }
  SUBCASE("orthogonal prototypes give shift 1") {
    LemmaInstanceSet s{0, MatrixXd(30, 2), MatrixXd(30, 2)};
    s.noun_vectors.rowwise() = Eigen::RowVector2d(1, 0);
    s.verb_vectors.rowwise() = Eigen::RowVector2d(0, 1);
    CHECK(balanced_lemma_stats(s, 0)->shift == doctest::Approx(1.0));
  }
  SUBCASE("below threshold is excluded") {
    LemmaInstanceSet s{0, random_rows(rng, 29, 2), random_rows(rng, 100, 2)};
    CHECK_FALSE(balanced_lemma_stats(s, 0).has_value());
    CHECK(balanced_lemma_stats(s, 0, 10).has_value());
  }
}

TEST_CASE("language_semantics") {
  SUBCASE("NVS and VNS") {
    std::vector<LemmaSemantics> l{lemma(Dominance::noun, 0.2, 1.0, 2.0), lemma(Dominance::verb, 0.1, 1.5, 1.0)};
    const auto r = language_semantics(l);
    CHECK(*r.nvs == doctest::Approx(0.2));
    CHECK(*r.vns == doctest::Approx(0.1));
    CHECK(r.noun_variation == doctest::Approx(1.25));
    CHECK(r.verb_variation == doctest::Approx(1.5));
    CHECK(r.majority_variation == doctest::Approx(1.0));
    CHECK(r.minority_variation == doctest::Approx(1.75));
    CHECK(r.n_lemmas == 2);
  }
  SUBCASE("identical variations make the paired test absent") {
    std::vector<LemmaSemantics> l{lemma(Dominance::noun, 0.2, 1.0, 1.0), lemma(Dominance::verb, 0.1, 2.0, 2.0),
                                  lemma(Dominance::noun, 0.3, 3.0, 3.0)};
    const auto r = language_semantics(l);
    CHECK_FALSE(r.noun_verb_test.has_value());
    CHECK_FALSE(r.p_values().at("noun_vs_verb_variation").has_value());
    CHECK_FALSE(r.diagnostics.empty());
  }
  SUBCASE("missing dominance class") {
    std::vector<LemmaSemantics> l{lemma(Dominance::noun, 0.2, 1.0, 2.0), lemma(Dominance::noun, 0.3, 1.0, 3.0)};
    const auto r = language_semantics(l);
    CHECK(r.nvs.has_value());
    CHECK_FALSE(r.vns.has_value());
    CHECK_FALSE(r.shift_test.has_value());
  }
  SUBCASE("means match brute-force recomputation") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<LemmaSemantics> l;
    for (int i = 0; i < 40; ++i) l.push_back(lemma(i % 3 ? Dominance::noun : Dominance::verb, u(rng), u(rng), u(rng)));
    const auto r = language_semantics(l);
    double nvs = 0, nn = 0, maj = 0;
    for (const auto& s : l) {
      if (s.dominant == Dominance::noun) {
        nvs += s.shift;
        ++nn;
        maj += s.noun_variation;
      } else {
        maj += s.verb_variation;
      }
    }
    CHECK(std::fabs(*r.nvs - nvs / nn) < 1e-10);
    CHECK(std::fabs(r.majority_variation - maj / 40.0) < 1e-10);
    for (const auto& [name, p] : r.p_values()) {
      if (p) CHECK((*p >= 0.0 && *p <= 1.0));
    }
  }
}

TEST_CASE("noun_verb_similarity") {
  LemmaInstanceSet same{0, MatrixXd::Constant(3, 2, 1.0), MatrixXd::Constant(4, 2, 1.0)};
  CHECK(noun_verb_similarity(same) == doctest::Approx(0.0));
  LemmaInstanceSet opposite{0, MatrixXd::Constant(3, 2, 1.0), MatrixXd::Constant(4, 2, -1.0)};
  CHECK(noun_verb_similarity(opposite) == doctest::Approx(2.0));
  LemmaInstanceSet zero{0, MatrixXd::Zero(3, 2), MatrixXd::Constant(4, 2, -1.0)};
  CHECK_THROWS_AS(noun_verb_similarity(zero), Error);
}

TEST_CASE("probe_correlation") {
  const std::vector<double> a{1, 2, 3, 4}, rev{4, 3, 2, 1}, swap{1, 3, 2, 4}, flat{2, 2, 2, 2};
  CHECK(probe_correlation(a, a) == doctest::Approx(1.0));
  CHECK(probe_correlation(a, rev) == doctest::Approx(-1.0));
  CHECK(probe_correlation(a, swap) == doctest::Approx(0.8));
  CHECK_THROWS_AS(probe_correlation(a, flat), Error);
}
