#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "layerlens/cxn/clustering.hpp"
#include "layerlens/cxn/congruence.hpp"
#include "layerlens/cxn/deviation.hpp"
#include "layerlens/cxn/jabberwocky.hpp"
#include "layerlens/cxn/pca.hpp"
#include "layerlens/cxn/sorting.hpp"
#include "layerlens/cxn/standardize.hpp"
#include "layerlens/error.hpp"

using namespace layerlens;
using namespace layerlens::cxn;

namespace {

int brute_force_deviation(const std::vector<int>& a, const std::vector<int>& r) {
  std::array<int, 4> perm{0, 1, 2, 3};
  int best = 0;
  do {
    int agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) agree += perm[a[i]] == r[i];
    best = std::max(best, agree);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<int>(a.size()) - best;
}

// Ward by explicit centroids: merge the pair with the smallest increase in
// within-cluster sum of squares, recomputed from scratch every step.
std::vector<int> ward_by_centroids(const MatrixXd& x, int k) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < x.rows(); ++i) clusters.push_back({i});
  auto centroid = [&](const std::vector<int>& c) {
    Eigen::RowVectorXd m = Eigen::RowVectorXd::Zero(x.cols());
    for (int i : c) m += x.row(i);
    return Eigen::RowVectorXd(m / static_cast<double>(c.size()));
  };
  while (static_cast<int>(clusters.size()) > k) {
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double ni = static_cast<double>(clusters[i].size()), nj = static_cast<double>(clusters[j].size());
        const double cost = ni * nj / (ni + nj) * (centroid(clusters[i]) - centroid(clusters[j])).squaredNorm();
        if (cost < best) {
          best = cost;
          bi = i;
          bj = j;
        }
      }
    }
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  std::vector<int> cluster_of(static_cast<std::size_t>(x.rows()));
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (int i : clusters[c]) cluster_of[static_cast<std::size_t>(i)] = static_cast<int>(c);
  std::vector<int> relabel(clusters.size(), -1), out;
  int next = 0;
  for (int c : cluster_of) {
    if (relabel[static_cast<std::size_t>(c)] < 0) relabel[static_cast<std::size_t>(c)] = next++;
    out.push_back(relabel[static_cast<std::size_t>(c)]);
  }
  return out;
}

std::vector<int> verb_labels() {
  std::vector<int> v;
  for (int i = 0; i < 16; ++i) v.push_back(i / 4);
  return v;
}

std::vector<int> construction_labels() {
  std::vector<int> v;
  for (int i = 0; i < 16; ++i) v.push_back(i % 4);
  return v;
}

}  // namespace

TEST_CASE("sort_deviation examples") {
  const auto verbs = verb_labels(), cxns = construction_labels();
  CHECK(sort_deviation(verbs, verbs) == 0);
  CHECK(sort_deviation(verbs, cxns) == 12);
  CHECK(sort_deviation(cxns, verbs) == 12);
  std::vector<int> bad = verbs;
  bad[3] = 4;
  CHECK_THROWS_AS(sort_deviation(bad, cxns), Error);
  CHECK_THROWS_AS(sort_deviation(std::vector<int>{0, 1}, cxns), Error);
}

TEST_CASE("sort_deviation agrees with brute-force matching") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> lab(0, 3);
  const auto cxns = construction_labels();
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<int> a(16), r(16);
    for (auto& v : a) v = lab(rng);
    for (auto& v : r) v = lab(rng);
    CHECK(sort_deviation(a, r) == brute_force_deviation(a, r));
    const int d = sort_deviation(a, cxns);
    CHECK((d >= 0 && d <= 12));
    std::array<int, 4> perm{2, 0, 3, 1};
    std::vector<int> relabeled;
    for (int v : a) relabeled.push_back(perm[static_cast<std::size_t>(v)]);
    CHECK(sort_deviation(relabeled, r) == sort_deviation(a, r));
  }
}

TEST_CASE("contingency counts") {
  const auto m = contingency(verb_labels(), construction_labels(), 4);
  CHECK((m.array() == 1).all());
}

TEST_CASE("Ward clustering matches a centroid-based oracle") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    MatrixXd x(16, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
    CHECK(agglomerative_cluster(x, 4, Linkage::ward) == ward_by_centroids(x, 4));
  }
}

TEST_CASE("clustering examples") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 0.1);
  MatrixXd x(16, 2);
  for (int i = 0; i < 16; ++i) x.row(i) << 100.0 * (i % 4) + g(rng), g(rng);
  for (auto linkage : {Linkage::ward, Linkage::complete, Linkage::average, Linkage::single}) {
    const auto labels = agglomerative_cluster(x, 4, linkage);
    CHECK(sort_deviation(labels, construction_labels()) == 0);
  }
  const auto same = agglomerative_cluster(MatrixXd::Zero(16, 3), 4);
  CHECK(std::set<int>(same.begin(), same.end()).size() == 4);
  CHECK(sort_deviation(same, construction_labels()) <= 12);
  const auto singles = agglomerative_cluster(x, 16);
  CHECK(std::set<int>(singles.begin(), singles.end()).size() == 16);
  x(3, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(agglomerative_cluster(x, 4), Error);
  CHECK(parse_linkage("average") == Linkage::average);
  CHECK(linkage_name(Linkage::ward) == "ward");
}

TEST_CASE("pca_project") {
  SUBCASE("collinear points") {
    MatrixXd x(5, 3);
    for (int i = 0; i < 5; ++i) x.row(i) = Eigen::RowVector3d(1, 2, -1) * i;
    const auto p = pca_project(x, 1);
    CHECK(std::fabs(p.explained_ratio(0) - 1.0) < 1e-10);
    CHECK(p.rank == 1);
    CHECK_THROWS_AS(pca_project(x, 2), RankError);
  }
  SUBCASE("isotropic 2-D data") {
    std::mt19937_64 rng(24);
    std::normal_distribution<double> g;
    MatrixXd x(4000, 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
    const auto p = pca_project(x);
    CHECK(std::fabs(p.explained_ratio(0) - 0.5) < 0.05);
    CHECK(std::fabs(p.explained_ratio(1) - 0.5) < 0.05);
    CHECK(p.explained_ratio(0) >= p.explained_ratio(1));
    CHECK(p.explained_ratio.sum() <= 1.0 + 1e-12);
  }
  SUBCASE("data in a 2-D subspace keeps pairwise distances") {
    std::mt19937_64 rng(25);
    std::normal_distribution<double> g;
    MatrixXd basis(2, 6), coords(12, 2);
    for (Eigen::Index i = 0; i < basis.size(); ++i) basis(i) = g(rng);
    for (Eigen::Index i = 0; i < coords.size(); ++i) coords(i) = g(rng);
    const MatrixXd x = coords * basis;
    const auto p = pca_project(x);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j)
        CHECK(std::fabs((p.scores.row(i) - p.scores.row(j)).norm() - (x.row(i) - x.row(j)).norm()) < 1e-8);
    for (Eigen::Index c = 0; c < 2; ++c) {
      Eigen::Index arg = 0;
      p.directions.col(c).cwiseAbs().maxCoeff(&arg);
      CHECK(p.directions(arg, c) > 0);
    }
  }
}

TEST_CASE("sentence_embedding and prototype_verb") {
  MatrixXd one(1, 2);
  one << 3, 4;
  CHECK(sentence_embedding(one) == Eigen::Vector2d(3, 4));
  MatrixXd two(2, 2);
  two << 0, 0, 2, 2;
  CHECK(sentence_embedding(two).isApprox(Eigen::Vector2d(1, 1)));
  MatrixXd swapped = two.colwise().reverse();
  CHECK(sentence_embedding(swapped) == sentence_embedding(two));
  MatrixXd occ(2, 2);
  occ << 1, 1, 3, 3;
  CHECK(prototype_verb(occ).isApprox(Eigen::Vector2d(2, 2)));
  CHECK_THROWS_AS(sentence_embedding(MatrixXd(0, 2)), Error);
  CHECK_THROWS_AS(prototype_verb(MatrixXd(0, 2)), Error);
}

TEST_CASE("generate_sorting_trials") {
  const auto& lex = default_sorting_lexicon();
  CHECK(lex.verbs.size() == 10);
  const auto trials = generate_sorting_trials(lex, 50, 7);
  REQUIRE(trials.size() == 50);
  for (const auto& t : trials) {
    REQUIRE(t.sentences.size() == 16);
    CHECK(std::set<std::string>(t.verbs.begin(), t.verbs.end()).size() == 4);
    std::array<int, 4> per_verb{}, per_cxn{};
    std::set<std::pair<int, int>> cells;
    for (const auto& s : t.sentences) {
      ++per_verb[static_cast<std::size_t>(s.verb_label)];
      ++per_cxn[static_cast<std::size_t>(s.construction_label)];
      cells.insert({s.verb_label, s.construction_label});
    }
    CHECK(per_verb == std::array<int, 4>{4, 4, 4, 4});
    CHECK(per_cxn == std::array<int, 4>{4, 4, 4, 4});
    CHECK(cells.size() == 16);
    for (int c = 0; c < 4; ++c) {
      std::vector<std::set<std::string>> words;
      for (const auto& s : t.sentences)
        if (s.construction_label == c) words.push_back(content_words(s.text, lex.function_words));
      for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = i + 1; j < words.size(); ++j)
          for (const auto& w : words[i]) CHECK_MESSAGE(!words[j].count(w), w);
    }
  }
  const auto again = generate_sorting_trials(lex, 2, 99), other = generate_sorting_trials(lex, 2, 99);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t s = 0; s < 16; ++s) CHECK(again[i].sentences[s].text == other[i].sentences[s].text);

  SortingLexicon tiny = lex;
  tiny.names.resize(3);
  CHECK_THROWS_AS(generate_sorting_trials(tiny, 1, 0), Error);
}

TEST_CASE("evaluate_trial on pure verb-sort embeddings") {
  auto trial = generate_sorting_trials(default_sorting_lexicon(), 1, 3).front();
  trial.embeddings = MatrixXd::Zero(16, 4);
  for (int i = 0; i < 16; ++i) trial.embeddings(i, trial.sentences[static_cast<std::size_t>(i)].verb_label) = 50.0;
  evaluate_trial(trial);
  CHECK(trial.vdev == 0);
  CHECK(trial.cdev == 12);
  const auto summary = summarize_deviations({trial, trial});
  CHECK(summary.mean_cdev == 12.0);
  CHECK(*summary.cdev_half_width == 0.0);
  CHECK_FALSE(summarize_deviations({trial}).cdev_half_width.has_value());
}

TEST_CASE("Jabberwocky rendering") {
  const auto s = render_jabberwocky(Construction::ditransitive, true, "traded", true, "epicenter", "green");
  CHECK(s.text == "She traded her the epicenter.");
  CHECK(s.text.substr(s.verb_span.first, s.verb_span.second - s.verb_span.first) == "traded");
  CHECK(render_jabberwocky(Construction::resultative, false, "made", false, "cat", "green").text == "He made it green.");
  CHECK(render_jabberwocky(Construction::caused_motion, false, "put", false, "table", "x").text ==
        "He put it on the table.");
  CHECK(render_jabberwocky(Construction::removal, true, "took", false, "x", "x").text == "She took it from him.");
}

TEST_CASE("generate_jabberwocky") {
  const PosLexicon lex{{"epicenter", "bottle", "forest"}, {"traded", "sang", "opened"}, {"blue", "loud"}};
  const auto a = generate_jabberwocky(lex, 25, 5), b = generate_jabberwocky(lex, 25, 5);
  REQUIRE(a.size() == 100);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].text == b[i].text);
    CHECK(a[i].construction == kConstructions[i / 25]);
    CHECK(a[i].text.substr(a[i].verb_span.first, a[i].verb_span.second - a[i].verb_span.first) == a[i].verb_surface);
  }
  CHECK_THROWS_AS(generate_jabberwocky(PosLexicon{{}, {"x"}, {"y"}}, 1, 0), Error);
  CHECK(parse_construction(construction_name(Construction::caused_motion)) == Construction::caused_motion);
}

TEST_CASE("congruence_matrix") {
  std::mt19937_64 rng(26);
  std::normal_distribution<double> g(0.0, 0.5);
  std::vector<MatrixXd> verbs;
  std::vector<VectorXd> protos;
  for (int c = 0; c < 4; ++c) {
    VectorXd centre = VectorXd::Zero(4);
    centre(c) = 5.0;
    MatrixXd m(30, 4);
    for (int i = 0; i < 30; ++i) m.row(i) = centre.transpose() + Eigen::RowVector4d(g(rng), g(rng), g(rng), g(rng));
    verbs.push_back(m);
    protos.push_back(prototype_verb(m));
  }
  SUBCASE("prototypes at centroids") {
    const auto r = congruence_matrix(verbs, protos, {0, 1, 2, 3});
    CHECK(r.congruent_mean < r.incongruent_mean);
    CHECK(r.congruent_mean == doctest::Approx(r.mean_distance.diagonal().mean()));
    for (int c = 0; c < 4; ++c) {
      CHECK(r.mean_distance(c, c) == r.mean_distance.row(c).minCoeff());
      CHECK(r.congruent_rank(c) == 1);
    }
    REQUIRE(r.p_value.has_value());
    CHECK(*r.p_value < 0.001);
    CHECK((r.mean_distance.array() >= 0).all());
  }
  SUBCASE("permuted pairing selects other cells") {
    const auto r = congruence_matrix(verbs, protos, {1, 0, 3, 2});
    CHECK(r.congruent_mean > r.incongruent_mean);
    CHECK(r.congruent_mean ==
          doctest::Approx((r.mean_distance(0, 1) + r.mean_distance(1, 0) + r.mean_distance(2, 3) + r.mean_distance(3, 2)) / 4));
  }
  SUBCASE("identical embeddings") {
    std::vector<MatrixXd> flat(4, MatrixXd::Ones(5, 4));
    std::vector<VectorXd> same(4, VectorXd::Ones(4));
    const auto r = congruence_matrix(flat, same, {0, 1, 2, 3});
    CHECK((r.mean_distance.array() == r.mean_distance(0, 0)).all());
    CHECK_FALSE(r.p_value.has_value());
  }
  SUBCASE("non-bijective pairing") {
    CHECK_THROWS_AS(congruence_matrix(verbs, protos, {0, 0, 2, 3}), Error);
  }
  SUBCASE("standardized operands") {
    MatrixXd all(120, 4);
    for (int c = 0; c < 4; ++c) all.middleRows(30 * c, 30) = verbs[static_cast<std::size_t>(c)];
    const auto cal = fit_calibration(all, "synthetic");
    const auto r = congruence_matrix(verbs, protos, {0, 1, 2, 3}, &cal, FrequencyCondition::low);
    CHECK(r.congruent_mean < r.incongruent_mean);
    CHECK(r.frequency_condition == FrequencyCondition::low);
  }
  CHECK(prototype_verbs(FrequencyCondition::high)[0] == "gave");
  CHECK(prototype_verbs(FrequencyCondition::low)[3] == "removed");
}

TEST_CASE("standardize") {
  std::mt19937_64 rng(27);
  std::normal_distribution<double> g(3.0, 2.0);
  MatrixXd x(200, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
  const auto cal = fit_calibration(x, "sample");
  const MatrixXd z = standardize(x, cal);
  for (Eigen::Index c = 0; c < 5; ++c) {
    CHECK(std::fabs(z.col(c).mean()) < 1e-10);
    CHECK(std::fabs(std::sqrt(z.col(c).squaredNorm() / 200.0) - 1.0) < 1e-10);
  }
  StandardizationCalibration unit{VectorXd::Zero(5), VectorXd::Ones(5), "unit"};
  CHECK(standardize(MatrixXd::Zero(3, 5), unit) == MatrixXd::Zero(3, 5));
  CHECK_FALSE(standardize(z, cal).isApprox(z));
  StandardizationCalibration bad{VectorXd::Zero(2), Eigen::Vector2d(1.0, 0.0), "bad"};
  CHECK_THROWS_WITH(bad.validate(), doctest::Contains("1"));
  CHECK_THROWS_AS(standardize(MatrixXd::Zero(2, 2), bad), Error);

  const std::string path = "/tmp/layerlens_calibration.json";
  save_calibration(cal, path);
  const auto back = load_calibration(path);
  CHECK(back.mean == cal.mean);
  CHECK(back.std == cal.std);
  CHECK(back.source_id == "sample");
}
