#include "layerlens/gauss/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "layerlens/stats/correlation.hpp"

namespace layerlens::gauss {

std::string_view kind_name(CovarianceKind kind) noexcept {
  switch (kind) {
    case CovarianceKind::full: return "full";
    case CovarianceKind::diagonal: return "diag";
    case CovarianceKind::spherical: return "spherical";
  }
  return "full";
}

CovarianceKind parse_kind(std::string_view name) {
  if (name == "full") return CovarianceKind::full;
  if (name == "diag" || name == "diagonal") return CovarianceKind::diagonal;
  if (name == "spherical") return CovarianceKind::spherical;
  throw Error(ErrorCategory::config, "unknown covariance kind '" + std::string(name) + "'");
}

std::string_view aggregation_name(Aggregation agg) noexcept { return agg == Aggregation::sum ? "sum" : "max"; }

Aggregation parse_aggregation(std::string_view name) {
  if (name == "sum") return Aggregation::sum;
  if (name == "max") return Aggregation::max;
  throw Error(ErrorCategory::config, "unknown aggregation '" + std::string(name) + "'");
}

std::string_view anomaly_type_name(AnomalyType t) noexcept {
  switch (t) {
    case AnomalyType::morphosyntactic: return "morphosyntactic";
    case AnomalyType::semantic: return "semantic";
    case AnomalyType::commonsense: return "commonsense";
  }
  return "morphosyntactic";
}

AnomalyType parse_anomaly_type(std::string_view name) {
  if (name == "morphosyntactic") return AnomalyType::morphosyntactic;
  if (name == "semantic") return AnomalyType::semantic;
  if (name == "commonsense") return AnomalyType::commonsense;
  throw Error(ErrorCategory::validation, "unknown anomaly type '" + std::string(name) + "'");
}

std::vector<PairedAnomalyDataset> paired_datasets(const EmbeddingArchive& archive) {
  struct Partial {
    std::optional<std::size_t> control;
    std::optional<std::size_t> anomalous;
  };
  std::vector<PairedAnomalyDataset> tasks;
  std::map<std::string, std::size_t> task_index;
  std::vector<std::vector<std::string>> pair_order;
  std::vector<std::map<std::string, Partial>> partials;

  const auto& sentences = archive.sentences();
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& tags = sentences[i].tags;
    const auto task_it = tags.find("task");
    if (task_it == tags.end()) continue;
    auto tag = [&](const char* key) -> const std::string& {
      const auto it = tags.find(key);
      if (it == tags.end()) {
        throw Error(ErrorCategory::lookup, "sentence " + std::to_string(i) + " has task but no '" + key + "' tag");
      }
      return it->second;
    };
    auto [it, inserted] = task_index.try_emplace(task_it->second, tasks.size());
    if (inserted) {
      const auto type_it = tags.find("anomaly_type");
      tasks.push_back({task_it->second,
                       type_it == tags.end() ? AnomalyType::morphosyntactic : parse_anomaly_type(type_it->second),
                       {}});
      pair_order.emplace_back();
      partials.emplace_back();
    }
    const auto t = it->second;
    const auto& pair_id = tag("pair_id");
    const auto& condition = tag("condition");
    auto [pit, new_pair] = partials[t].try_emplace(pair_id);
    if (new_pair) pair_order[t].push_back(pair_id);
    if (condition == "control") {
      pit->second.control = i;
    } else if (condition == "anomalous") {
      pit->second.anomalous = i;
    } else {
      throw Error(ErrorCategory::validation, "sentence " + std::to_string(i) + ": condition must be control or anomalous");
    }
  }

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (const auto& id : pair_order[t]) {
      const auto& p = partials[t].at(id);
      if (!p.control || !p.anomalous) {
        throw Error(ErrorCategory::lookup, "task '" + tasks[t].task + "' pair '" + id + "' is missing its " +
                                               (p.control ? "anomalous" : "control") + " sentence");
      }
      tasks[t].pairs.push_back({id, *p.control, *p.anomalous});
    }
  }
  return tasks;
}

double pair_accuracy(std::span<const double> diffs) {
  if (diffs.empty()) throw Error(ErrorCategory::empty, "pair_accuracy: no pairs");
  const auto correct = std::count_if(diffs.begin(), diffs.end(), [](double d) { return d > 0.0; });
  return static_cast<double>(correct) / static_cast<double>(diffs.size());
}

double surprisal_gap(std::span<const double> diffs) {
  if (diffs.size() < 2) throw Error(ErrorCategory::validation, "surprisal_gap: need at least 2 pairs");
  if (std::all_of(diffs.begin(), diffs.end(), [&](double d) { return d == diffs.front(); })) {
    throw DegenerateError("surprisal_gap: differences have zero spread");
  }
  const double sd = stats::sample_sd(diffs);
  if (!(sd > 0.0)) throw DegenerateError("surprisal_gap: differences have zero spread");
  return stats::mean(diffs) / sd;
}

double mlm_accuracy(std::span<const MlmScore> scores) {
  if (scores.empty()) throw Error(ErrorCategory::empty, "mlm_accuracy: no scores");
  const auto correct = std::count_if(scores.begin(), scores.end(),
                                     [](const MlmScore& s) { return s.logp_correct > s.logp_anomalous; });
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

double frequency_correlation(std::span<const double> token_surprisals, std::span<const double> log_freqs) {
  return stats::pearson(token_surprisals, log_freqs);
}

}  // namespace layerlens::gauss
