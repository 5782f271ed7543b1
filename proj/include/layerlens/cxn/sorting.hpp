#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "layerlens/cxn/clustering.hpp"
#include "layerlens/error.hpp"
#include "layerlens/types.hpp"

namespace layerlens::cxn {

/// Column order of the 4 x 4 design.
enum class SortConstruction { transitive = 0, ditransitive = 1, caused_motion = 2, resultative = 3 };

constexpr std::array<std::string_view, 4> kSortConstructionNames = {"transitive", "ditransitive",
                                                                     "caused-motion", "resultative"};

struct SortingVerb {
  std::string lemma;
  std::string past;
  std::vector<std::string> objects;
  /// Caused-motion path phrases, e.g. "onto the bed".
  std::vector<std::string> goals;
  /// Resultative complements, e.g. "apart".
  std::vector<std::string> results;
};

/// Slot fillers for templated sorting stimuli.
struct SortingLexicon {
  std::vector<SortingVerb> verbs;
  std::vector<std::string> names;
  /// Words the templates themselves require; they may repeat within a column.
  std::set<std::string> function_words;
};

/// English pool: cut, hit, get, kick, pull, punch, push, slice, tear, throw,
/// with a curated filler lexicon.
const SortingLexicon& default_sorting_lexicon();
SortingLexicon load_sorting_lexicon(const std::string& path);

struct SortingSentence {
  std::string text;
  int verb_label = 0;          // 0..3, row of the design
  int construction_label = 0;  // 0..3, column of the design
};

struct SortingTrial {
  std::int64_t trial_id = 0;
  std::vector<std::string> verbs;  // lemma per verb label
  std::vector<SortingSentence> sentences;
  MatrixXd embeddings;  // 16 x D once filled
  std::vector<int> cluster_assignment;
  int cdev = -1;
  int vdev = -1;
};

/// Lowercased words of a sentence with punctuation stripped, minus the
/// lexicon's function words.
std::set<std::string> content_words(std::string_view sentence, const std::set<std::string>& function_words);

/// Seeded generation of `n_trials` 4 x 4 trials: 4 distinct verbs drawn from
/// the pool, slots filled so that no two sentences of one construction share a
/// content word, and no name repeats within a trial. Throws Error(generation)
/// naming the construction when the lexicon cannot satisfy that.
std::vector<SortingTrial> generate_sorting_trials(const SortingLexicon& lexicon, std::int64_t n_trials,
                                                  std::uint64_t seed);

/// Mean of token rows.
template <typename Derived>
VectorXd sentence_embedding(const Eigen::MatrixBase<Derived>& token_vectors) {
  if (token_vectors.rows() == 0) throw Error(ErrorCategory::empty, "sentence_embedding: no tokens");
  return token_vectors.template cast<double>().colwise().mean().transpose();
}

template <typename Derived>
std::vector<int> sort_trial(const Eigen::MatrixBase<Derived>& embeddings, int k = 4, Linkage linkage = Linkage::ward) {
  return agglomerative_cluster(embeddings, k, linkage);
}

/// Clusters the trial's embeddings and fills cluster_assignment, cdev and vdev.
void evaluate_trial(SortingTrial& trial, Linkage linkage = Linkage::ward);

struct DeviationSummary {
  std::int64_t n = 0;
  double mean_cdev = 0.0;
  double mean_vdev = 0.0;
  /// 95% t-interval half widths; absent with fewer than two trials.
  std::optional<double> cdev_half_width;
  std::optional<double> vdev_half_width;
};

DeviationSummary summarize_deviations(const std::vector<SortingTrial>& trials);

}  // namespace layerlens::cxn
