#include "layerlens/semshift.hpp"

#include <algorithm>
#include <cmath>

#include "layerlens/rng.hpp"
#include "layerlens/stats/correlation.hpp"

namespace layerlens::semshift {
namespace {

double downsampled_variation(const MatrixXd& rows, std::size_t keep, Rng& rng) {
  if (static_cast<std::size_t>(rows.rows()) == keep) return variation(rows);
  const auto picks = sample_without_replacement(rng, static_cast<std::size_t>(rows.rows()), keep);
  MatrixXd subset(static_cast<Eigen::Index>(keep), rows.cols());
  for (std::size_t i = 0; i < keep; ++i) subset.row(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(picks[i]));
  return variation(subset);
}

template <typename F>
std::optional<stats::TestResult> try_test(F&& f, const char* label, std::vector<std::string>& diag) {
  try {
    return f();
  } catch (const Error& e) {
    diag.push_back(std::string(label) + ": " + e.what());
    return std::nullopt;
  }
}

double average(const std::vector<double>& v) {
  return v.empty() ? 0.0 : stats::mean(v);
}

}  // namespace

double cosine_distance(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) throw Error(ErrorCategory::shape, "cosine_distance: dimension mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw Error(ErrorCategory::numeric, "cosine_distance: zero-norm vector");
  }
  return std::clamp(1.0 - a.dot(b) / (na * nb), 0.0, 2.0);
}

std::optional<LemmaSemantics> balanced_lemma_stats(const LemmaInstanceSet& instances,
                                                   std::uint64_t seed, std::int64_t min_each) {
  const auto n_noun = instances.noun_vectors.rows();
  const auto n_verb = instances.verb_vectors.rows();
  if (n_noun < min_each || n_verb < min_each || n_noun == 0 || n_verb == 0) return std::nullopt;
  if (instances.noun_vectors.cols() != instances.verb_vectors.cols()) {
    throw Error(ErrorCategory::shape, "balanced_lemma_stats: noun/verb dimension mismatch");
  }

  LemmaSemantics out;
  out.group_id = instances.group_id;
  out.noun_count = n_noun;
  out.verb_count = n_verb;
  out.dominant = lexicon::dominance(n_noun, n_verb);
  out.prototype_noun = prototype_vector(instances.noun_vectors);
  out.prototype_verb = prototype_vector(instances.verb_vectors);
  out.shift = cosine_distance(out.prototype_noun, out.prototype_verb);

  Rng rng(seed);
  const auto keep = static_cast<std::size_t>(std::min(n_noun, n_verb));
  out.noun_variation = downsampled_variation(instances.noun_vectors, keep, rng);
  out.verb_variation = downsampled_variation(instances.verb_vectors, keep, rng);
  return out;
}

std::map<std::string, std::optional<double>> LanguageSemantics::p_values() const {
  auto p = [](const std::optional<stats::TestResult>& t) -> std::optional<double> {
    if (!t) return std::nullopt;
    return t->p_value;
  };
  return {{"nvs_vs_vns", p(shift_test)},
          {"noun_vs_verb_variation", p(noun_verb_test)},
          {"majority_vs_minority_variation", p(majority_minority_test)}};
}

LanguageSemantics language_semantics(std::span<const LemmaSemantics> lemmas) {
  if (lemmas.empty()) throw Error(ErrorCategory::empty, "language_semantics: no lemmas");
  LanguageSemantics out;
  out.n_lemmas = static_cast<std::int64_t>(lemmas.size());

  std::vector<double> noun_shift, verb_shift, noun_var, verb_var, major_var, minor_var;
  for (const auto& l : lemmas) {
    if (l.dominant == Dominance::noun) noun_shift.push_back(l.shift);
    if (l.dominant == Dominance::verb) verb_shift.push_back(l.shift);
    noun_var.push_back(l.noun_variation);
    verb_var.push_back(l.verb_variation);
    major_var.push_back(l.majority_variation());
    minor_var.push_back(l.minority_variation());
  }

  if (noun_shift.empty()) {
    out.diagnostics.emplace_back("nvs: no noun-dominant lemmas");
  } else {
    out.nvs = stats::mean(noun_shift);
  }
  if (verb_shift.empty()) {
    out.diagnostics.emplace_back("vns: no verb-dominant lemmas");
  } else {
    out.vns = stats::mean(verb_shift);
  }
  out.noun_variation = average(noun_var);
  out.verb_variation = average(verb_var);
  out.majority_variation = average(major_var);
  out.minority_variation = average(minor_var);

  out.shift_test = try_test([&] { return stats::t_test_unpaired(noun_shift, verb_shift); },
                            "nvs_vs_vns", out.diagnostics);
  out.noun_verb_test = try_test([&] { return stats::t_test_paired(noun_var, verb_var); },
                                "noun_vs_verb_variation", out.diagnostics);
  out.majority_minority_test =
      try_test([&] { return stats::t_test_paired(major_var, minor_var); },
               "majority_vs_minority_variation", out.diagnostics);
  return out;
}

double noun_verb_similarity(const LemmaInstanceSet& instances) {
  return cosine_distance(prototype_vector(instances.noun_vectors),
                         prototype_vector(instances.verb_vectors));
}

double probe_correlation(std::span<const double> model_scores, std::span<const double> human_scores) {
  return stats::spearman(model_scores, human_scores);
}

}  // namespace layerlens::semshift
