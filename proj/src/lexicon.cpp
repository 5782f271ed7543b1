#include "layerlens/lexicon.hpp"

#include <algorithm>

#include "layerlens/error.hpp"
#include "layerlens/union_find.hpp"

namespace layerlens::lexicon {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

bool participates(std::string_view upos) { return upos == "NOUN" || upos == "VERB"; }

}  // namespace

std::optional<std::int64_t> LemmaPartition::group_of(std::string_view word) const {
  const auto it = group_of_form.find(fold_case(word));
  if (it == group_of_form.end()) return std::nullopt;
  return it->second;
}

std::string_view dominance_name(Dominance d) noexcept {
  switch (d) {
    case Dominance::noun: return "noun";
    case Dominance::verb: return "verb";
    case Dominance::tie: return "tie";
  }
  return "tie";
}

Corpus parse_conllu(std::string_view text, std::string source_id) {
  Corpus corpus;
  corpus.source_id = std::move(source_id);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const auto cols = split_tabs(line);
    if (cols.size() != 10) {
      throw ParseError(line_no, "expected 10 tab-separated columns, found " +
                                    std::to_string(cols.size()));
    }
    const auto id = cols[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) continue;
    if (cols[1].empty() || cols[2].empty()) throw ParseError(line_no, "empty FORM or LEMMA");
    corpus.tokens.push_back({std::string(cols[1]), std::string(cols[2]), std::string(cols[3])});
  }
  return corpus;
}

std::string fold_case(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

LemmaPartition merge_lemmas(const Corpus& corpus) {
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<std::string> strings;
  UnionFind sets;
  auto intern = [&](std::string s) {
    auto [it, inserted] = ids.try_emplace(s, strings.size());
    if (inserted) {
      strings.push_back(std::move(s));
      sets.add();
    }
    return it->second;
  };

  struct Occurrence {
    std::size_t id;
    bool noun;
  };
  std::vector<Occurrence> occurrences;
  for (const auto& tok : corpus.tokens) {
    if (!participates(tok.upos)) continue;
    const auto form = intern(fold_case(tok.form));
    const auto lemma = intern(fold_case(tok.lemma));
    sets.unite(form, lemma);
    occurrences.push_back({form, tok.upos == "NOUN"});
  }

  LemmaPartition partition;
  std::unordered_map<std::size_t, std::int64_t> group_of_root;
  // Interned ids follow first appearance, so this numbering is corpus order.
  for (std::size_t i = 0; i < strings.size(); ++i) {
    const auto root = sets.find(i);
    auto [it, inserted] =
        group_of_root.try_emplace(root, static_cast<std::int64_t>(partition.groups.size()));
    if (inserted) partition.groups.push_back(LemmaGroup{it->second, {}, 0, 0});
    partition.groups[it->second].members.insert(strings[i]);
    partition.group_of_form.emplace(strings[i], it->second);
  }
  for (const auto& occ : occurrences) {
    auto& group = partition.groups[group_of_root.at(sets.find(occ.id))];
    (occ.noun ? group.noun_count : group.verb_count) += 1;
  }
  return partition;
}

Dominance dominance(std::int64_t noun_count, std::int64_t verb_count) noexcept {
  if (noun_count > verb_count) return Dominance::noun;
  if (verb_count > noun_count) return Dominance::verb;
  return Dominance::tie;
}

bool is_flexible(std::int64_t noun_count, std::int64_t verb_count, const Thresholds& t) noexcept {
  const auto total = noun_count + verb_count;
  if (total < t.min_total || total == 0) return false;
  const auto minority = static_cast<double>(std::min(noun_count, verb_count));
  // minority/total >= frac, compared without the rounding of a division.
  return minority >= t.minority_frac * static_cast<double>(total);
}

FlexibilityTable classify_lemmas(const LemmaPartition& partition, const Thresholds& t) {
  if (t.min_total <= 0 || !(t.minority_frac > 0)) {
    throw Error(ErrorCategory::validation, "classify_lemmas: thresholds must be positive");
  }
  FlexibilityTable table;
  table.rows.reserve(partition.groups.size());
  for (const auto& g : partition.groups) {
    table.rows.push_back({g.id, g.noun_count, g.verb_count,
                          is_flexible(g.noun_count, g.verb_count, t),
                          dominance(g.noun_count, g.verb_count)});
  }
  return table;
}

LanguageFlexibility language_flexibility(const FlexibilityTable& table) {
  if (table.rows.empty()) throw Error(ErrorCategory::empty, "language_flexibility: empty table");
  LanguageFlexibility out;
  std::int64_t flexible_nouns = 0;
  std::int64_t flexible_verbs = 0;
  for (const auto& row : table.rows) {
    if (row.dominant == Dominance::noun) {
      ++out.noun_lemmas;
      flexible_nouns += row.flexible ? 1 : 0;
    } else if (row.dominant == Dominance::verb) {
      ++out.verb_lemmas;
      flexible_verbs += row.flexible ? 1 : 0;
    }
  }
  if (out.noun_lemmas > 0) {
    out.noun_flexibility = static_cast<double>(flexible_nouns) / static_cast<double>(out.noun_lemmas);
  }
  if (out.verb_lemmas > 0) {
    out.verb_flexibility = static_cast<double>(flexible_verbs) / static_cast<double>(out.verb_lemmas);
  }
  return out;
}

bool passes_inclusion(const LanguageFlexibility& lf, double min_rate) noexcept {
  return lf.noun_flexibility && lf.verb_flexibility && *lf.noun_flexibility >= min_rate &&
         *lf.verb_flexibility >= min_rate;
}

}  // namespace layerlens::lexicon
