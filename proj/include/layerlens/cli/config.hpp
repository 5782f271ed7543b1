#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "layerlens/cxn/clustering.hpp"
#include "layerlens/cxn/congruence.hpp"
#include "layerlens/gauss/gaussian.hpp"
#include "layerlens/lexicon.hpp"
#include "layerlens/sentences.hpp"

namespace layerlens::cli {

/// Effective run parameters. JSON layout:
///   { "seed": 0, "layer": 11,
///     "tokens":   { "include_special": false, "special_tokens": [...] },
///     "lexicon":  { "min_total": 10, "minority_frac": 0.05, "inclusion_rate": 0.025 },
///     "semshift": { "min_each": 30 },
///     "gauss":    { "covariance": "full", "ridge": 1e-6, "agg": "sum", "train_sentences": 1000,
///                   "k": 2, "max_iter": 200, "tol": 1e-4 },
///     "sort":     { "linkage": "ward", "trials": 1000 },
///     "jabber":   { "n_per_construction": 5000, "frequency": "high" } }
struct RunConfig {
  std::uint64_t seed = 0;
  std::optional<std::int64_t> layer;

  TokenFilter tokens;

  lexicon::Thresholds thresholds;
  double inclusion_rate = 0.025;

  std::int64_t min_each = 30;

  gauss::CovarianceKind covariance = gauss::CovarianceKind::full;
  double ridge = 1e-6;
  gauss::Aggregation agg = gauss::Aggregation::sum;
  std::int64_t train_sentences = 1000;
  int gmm_k = 2;
  int max_iter = 200;
  double tol = 1e-4;

  cxn::Linkage linkage = cxn::Linkage::ward;
  std::int64_t trials = 1000;

  std::int64_t n_per_construction = 5000;
  cxn::FrequencyCondition frequency = cxn::FrequencyCondition::high;

  /// Unknown keys seen while loading, as dotted paths.
  std::vector<std::string> warnings;

  /// Canonical JSON of every effective setting (warnings excluded).
  std::string canonical_json() const;
  /// SHA-256 hex of canonical_json().
  std::string hash() const;
  /// Throws Error(config) on an out-of-range setting.
  void validate() const;
};

/// Parses a JSON document over the defaults. Malformed JSON throws
/// Error(config) with the byte offset; a wrongly typed value names its key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

}  // namespace layerlens::cli
