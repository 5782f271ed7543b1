#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace layerlens::lexicon {

struct CorpusToken {
  std::string form;
  std::string lemma;
  std::string upos;
};

struct Corpus {
  std::vector<CorpusToken> tokens;
  std::string source_id;
};

struct LemmaGroup {
  std::int64_t id = 0;
  /// Lowercased forms and lemma strings, sorted.
  std::set<std::string> members;
  std::int64_t noun_count = 0;
  std::int64_t verb_count = 0;
};

struct LemmaPartition {
  std::vector<LemmaGroup> groups;
  std::unordered_map<std::string, std::int64_t> group_of_form;

  /// Group id for a form or lemma string (case-insensitive), if observed.
  std::optional<std::int64_t> group_of(std::string_view word) const;
};

enum class Dominance { noun, verb, tie };

std::string_view dominance_name(Dominance d) noexcept;

struct FlexibilityRow {
  std::int64_t group_id = 0;
  std::int64_t noun_count = 0;
  std::int64_t verb_count = 0;
  bool flexible = false;
  Dominance dominant = Dominance::tie;
};

struct FlexibilityTable {
  std::vector<FlexibilityRow> rows;
};

struct LanguageFlexibility {
  std::int64_t noun_lemmas = 0;
  std::int64_t verb_lemmas = 0;
  /// Absent when there are no noun-dominant (verb-dominant) lemmas.
  std::optional<double> noun_flexibility;
  std::optional<double> verb_flexibility;
};

struct Thresholds {
  std::int64_t min_total = 10;
  double minority_frac = 0.05;
};

/// Reads FORM, LEMMA and UPOS from every word line; skips comments, multiword
/// ranges ("1-2") and empty nodes ("1.1"). Throws ParseError on a line that
/// does not have 10 tab-separated columns.
Corpus parse_conllu(std::string_view text, std::string source_id = {});

/// ASCII lowercase; bytes >= 0x80 pass through unchanged.
std::string fold_case(std::string_view s);

/// Unites each NOUN/VERB token's form with its lemma; connected components
/// become groups, numbered in order of first appearance in the corpus.
LemmaPartition merge_lemmas(const Corpus& corpus);

Dominance dominance(std::int64_t noun_count, std::int64_t verb_count) noexcept;
bool is_flexible(std::int64_t noun_count, std::int64_t verb_count, const Thresholds& t) noexcept;

FlexibilityTable classify_lemmas(const LemmaPartition& partition, const Thresholds& t = {});

/// Fraction of noun-dominant (verb-dominant) lemmas that are flexible. Ties
/// count toward neither class.
LanguageFlexibility language_flexibility(const FlexibilityTable& table);

/// True when both flexibilities are present and at least `min_rate`.
bool passes_inclusion(const LanguageFlexibility& lf, double min_rate = 0.025) noexcept;

}  // namespace layerlens::lexicon
