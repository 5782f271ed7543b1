#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "layerlens/embedstore.hpp"
#include "layerlens/error.hpp"
#include "layerlens/gauss/gaussian.hpp"
#include "layerlens/sentences.hpp"

namespace layerlens::gauss {

enum class AnomalyType { morphosyntactic, semantic, commonsense };

std::string_view anomaly_type_name(AnomalyType t) noexcept;
AnomalyType parse_anomaly_type(std::string_view name);

struct SentencePair {
  std::string pair_id;
  std::size_t control = 0;    // sentence index in the archive
  std::size_t anomalous = 0;  // sentence index in the archive
};

struct PairedAnomalyDataset {
  std::string task;
  AnomalyType anomaly_type = AnomalyType::morphosyntactic;
  std::vector<SentencePair> pairs;
};

/// Groups archive sentences into minimal pairs by their tags: `task`,
/// `anomaly_type`, `pair_id` and `condition` (control | anomalous). Tasks come
/// back in order of first appearance. Throws Error(lookup) when a pair lacks
/// one of its members.
std::vector<PairedAnomalyDataset> paired_datasets(const EmbeddingArchive& archive);

/// Sentence surprisal of one archive sentence under any model type that has a
/// `sentence_surprisal(model, rows, agg)` overload.
template <typename Model>
double archive_sentence_surprisal(const Model& model, const EmbeddingArchive& archive, std::size_t sentence,
                                  std::int64_t layer, Aggregation agg, const TokenFilter& filter) {
  const auto rows = sentence_rows(archive, sentence, layer, filter);
  return static_cast<double>(sentence_surprisal(model, rows, agg));
}

/// Per-pair surprisal(anomalous) - surprisal(control).
template <typename Model>
std::vector<double> surprisal_differences(const Model& model, const PairedAnomalyDataset& data,
                                          const EmbeddingArchive& archive, std::int64_t layer,
                                          Aggregation agg, const TokenFilter& filter = {}) {
  std::vector<double> diffs;
  diffs.reserve(data.pairs.size());
  for (const auto& p : data.pairs) {
    diffs.push_back(archive_sentence_surprisal(model, archive, p.anomalous, layer, agg, filter) -
                    archive_sentence_surprisal(model, archive, p.control, layer, agg, filter));
  }
  return diffs;
}

/// Fraction of differences that are strictly positive; ties are incorrect.
double pair_accuracy(std::span<const double> diffs);

/// Fraction of pairs whose anomalous sentence has strictly higher surprisal.
template <typename Model>
double minimal_pair_eval(const Model& model, const PairedAnomalyDataset& data, const EmbeddingArchive& archive,
                         std::int64_t layer, Aggregation agg, const TokenFilter& filter = {}) {
  if (data.pairs.empty()) throw Error(ErrorCategory::empty, "minimal_pair_eval: no pairs");
  return pair_accuracy(surprisal_differences(model, data, archive, layer, agg, filter));
}

/// mean(diffs) / sd(diffs) with sd denominator n - 1. Throws DegenerateError
/// when sd is zero.
double surprisal_gap(std::span<const double> diffs);

struct GapResult {
  std::string task;
  AnomalyType anomaly_type = AnomalyType::morphosyntactic;
  std::vector<std::int64_t> layers;
  std::vector<double> mean_diff;
  std::vector<double> sd_diff;
  /// Absent for a layer whose differences have zero spread.
  std::vector<std::optional<double>> per_layer_gap;
  std::vector<std::string> diagnostics;
};

/// Surprisal gap at every layer, one fitted model per layer (model.layer()
/// selects the archive plane).
template <typename Scalar>
GapResult surprisal_gap(std::span<const GaussianModel<Scalar>> per_layer, const PairedAnomalyDataset& data,
                        const EmbeddingArchive& archive, Aggregation agg = Aggregation::sum,
                        const TokenFilter& filter = {}) {
  if (data.pairs.size() < 2) throw Error(ErrorCategory::validation, "surprisal_gap: need at least 2 pairs");
  GapResult out;
  out.task = data.task;
  out.anomaly_type = data.anomaly_type;
  for (const auto& model : per_layer) {
    const auto diffs = surprisal_differences(model, data, archive, model.layer(), agg, filter);
    double m = 0.0;
    for (double d : diffs) m += d;
    m /= static_cast<double>(diffs.size());
    double ss = 0.0;
    for (double d : diffs) ss += (d - m) * (d - m);
    out.layers.push_back(model.layer());
    out.mean_diff.push_back(m);
    out.sd_diff.push_back(std::sqrt(ss / static_cast<double>(diffs.size() - 1)));
    try {
      out.per_layer_gap.push_back(surprisal_gap(diffs));
    } catch (const DegenerateError& e) {
      out.per_layer_gap.push_back(std::nullopt);
      out.diagnostics.push_back("layer " + std::to_string(model.layer()) + ": " + e.what());
    }
  }
  return out;
}

struct MlmScore {
  std::string pair_id;
  double logp_correct = 0.0;
  double logp_anomalous = 0.0;
};

/// Fraction of rows with logp_correct > logp_anomalous.
double mlm_accuracy(std::span<const MlmScore> scores);

/// Pearson r between token surprisals and log frequencies.
double frequency_correlation(std::span<const double> token_surprisals, std::span<const double> log_freqs);

}  // namespace layerlens::gauss
