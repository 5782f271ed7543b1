#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "layerlens/cxn/jabberwocky.hpp"
#include "layerlens/error.hpp"
#include "layerlens/cxn/standardize.hpp"
#include "layerlens/stats/ttest.hpp"
#include "layerlens/types.hpp"

namespace layerlens::cxn {

enum class FrequencyCondition { high, low };

std::string_view frequency_name(FrequencyCondition f) noexcept;
FrequencyCondition parse_frequency(std::string_view name);

/// Prototype verbs in construction order (ditransitive, resultative,
/// caused-motion, removal): gave/made/put/took or handed/turned/placed/removed.
const std::array<std::string, 4>& prototype_verbs(FrequencyCondition f);

/// Mean of occurrence rows (first sub-token embeddings of the verb).
template <typename Derived>
VectorXd prototype_verb(const Eigen::MatrixBase<Derived>& occurrences) {
  if (occurrences.rows() == 0) throw Error(ErrorCategory::empty, "prototype_verb: no occurrences");
  return occurrences.template cast<double>().colwise().mean().transpose();
}

struct CongruenceResult {
  /// Row: construction, column: prototype verb.
  Eigen::Matrix4d mean_distance = Eigen::Matrix4d::Zero();
  double congruent_mean = 0.0;
  double incongruent_mean = 0.0;
  /// Unpaired t over per-sentence congruent vs incongruent distances; absent
  /// when degenerate.
  std::optional<stats::TestResult> test;
  std::optional<double> p_value;
  FrequencyCondition frequency_condition = FrequencyCondition::high;
  /// pairing[c] = prototype column congruent with construction c.
  std::array<int, 4> pairing = {0, 1, 2, 3};
  std::vector<std::string> diagnostics;

  /// 1-based rank of the congruent prototype within row c (1 = closest).
  int congruent_rank(int construction) const;
};

/// Euclidean distance of every Jabberwocky verb embedding to each prototype,
/// averaged per (construction, prototype) cell. `verbs_by_construction[c]` is
/// n_c x D. When `calibration` is given both operands are standardized first.
CongruenceResult congruence_matrix(std::span<const MatrixXd> verbs_by_construction,
                                   std::span<const VectorXd> prototypes, std::array<int, 4> pairing,
                                   const StandardizationCalibration* calibration = nullptr,
                                   FrequencyCondition frequency = FrequencyCondition::high);

}  // namespace layerlens::cxn
