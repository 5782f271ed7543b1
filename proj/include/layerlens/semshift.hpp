#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "layerlens/error.hpp"
#include "layerlens/lexicon.hpp"
#include "layerlens/stats/ttest.hpp"
#include "layerlens/types.hpp"

namespace layerlens::semshift {

using lexicon::Dominance;

/// Column mean of the rows.
template <typename Derived>
VectorXd prototype_vector(const Eigen::MatrixBase<Derived>& rows) {
  if (rows.rows() == 0) throw Error(ErrorCategory::empty, "prototype_vector: no instances");
  return rows.template cast<double>().colwise().mean().transpose();
}

/// Mean Euclidean distance of each row to the prototype.
template <typename Derived>
double variation(const Eigen::MatrixBase<Derived>& rows) {
  const VectorXd proto = prototype_vector(rows);
  return (rows.template cast<double>().rowwise() - proto.transpose()).rowwise().norm().mean();
}

/// 1 - cosine similarity, in [0, 2]. Throws Error(numeric) on a zero vector.
double cosine_distance(const VectorXd& a, const VectorXd& b);

struct LemmaInstanceSet {
  std::int64_t group_id = 0;
  MatrixXd noun_vectors;  // [n_noun x D]
  MatrixXd verb_vectors;  // [n_verb x D]
};

struct LemmaSemantics {
  std::int64_t group_id = 0;
  std::int64_t noun_count = 0;
  std::int64_t verb_count = 0;
  VectorXd prototype_noun;
  VectorXd prototype_verb;
  double noun_variation = 0.0;
  double verb_variation = 0.0;
  Dominance dominant = Dominance::tie;
  double shift = 0.0;

  // A tie counts the noun class as the majority.
  double majority_variation() const noexcept {
    return dominant == Dominance::verb ? verb_variation : noun_variation;
  }
  double minority_variation() const noexcept {
    return dominant == Dominance::verb ? noun_variation : verb_variation;
  }
};

/// Per-lemma prototypes, variations and shift. Prototypes use every instance;
/// the majority class is downsampled (seeded, without replacement) to the
/// minority count before its variation is computed. Returns nullopt when either
/// class has fewer than `min_each` instances.
std::optional<LemmaSemantics> balanced_lemma_stats(const LemmaInstanceSet& instances,
                                                   std::uint64_t seed,
                                                   std::int64_t min_each = 30);

struct LanguageSemantics {
  std::optional<double> nvs;
  std::optional<double> vns;
  double noun_variation = 0.0;
  double verb_variation = 0.0;
  double majority_variation = 0.0;
  double minority_variation = 0.0;
  /// NVS vs VNS (unpaired).
  std::optional<stats::TestResult> shift_test;
  /// Noun vs verb variation (paired).
  std::optional<stats::TestResult> noun_verb_test;
  /// Majority vs minority variation (paired).
  std::optional<stats::TestResult> majority_minority_test;
  std::int64_t n_lemmas = 0;
  std::vector<std::string> diagnostics;

  std::map<std::string, std::optional<double>> p_values() const;
};

LanguageSemantics language_semantics(std::span<const LemmaSemantics> lemmas);

/// Cosine distance between the mean noun and mean verb vectors.
double noun_verb_similarity(const LemmaInstanceSet& instances);

/// Spearman rho between model scores and human scores (average ranks for ties).
/// Model cosine distances against human similarity ratings give a negative rho.
double probe_correlation(std::span<const double> model_scores, std::span<const double> human_scores);

}  // namespace layerlens::semshift
