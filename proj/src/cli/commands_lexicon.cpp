#include <algorithm>
#include <map>
#include <ostream>

#include "common.hpp"
#include "json.hpp"
#include "layerlens/cli/parallel.hpp"
#include "layerlens/lexicon.hpp"
#include "layerlens/semshift.hpp"
#include "layerlens/stats/ttest.hpp"

namespace layerlens::cli {

using namespace detail;

void Context::warning(const std::string& message) const {
  if (warn) *warn << "warning: " << message << '\n';
}

namespace {

lexicon::Corpus corpus_from(const std::string& path) { return lexicon::parse_conllu(read_file(path), path); }

std::string members_field(const lexicon::LemmaGroup& g) {
  return join(std::vector<std::string>(g.members.begin(), g.members.end()), " ");
}

std::string bool_field(bool b) { return b ? "true" : "false"; }

// NOUN/VERB words of an archive: the first sub-token of each word carrying a
// lemma and UPOS. The word form is the whitespace word of the sentence text.
struct ArchiveWords {
  lexicon::Corpus corpus;
  std::vector<std::uint64_t> token;  // archive token per corpus entry
};

ArchiveWords archive_words(const EmbeddingArchive& archive) {
  ArchiveWords out;
  for (std::size_t s = 0; s < archive.sentences().size(); ++s) {
    const auto& sentence = archive.sentences()[s];
    const auto words = split_words(sentence.text);
    std::int64_t previous = -1;
    for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
      const auto& tok = sentence.tokens[t];
      const bool first = tok.word_index >= 0 && tok.word_index != previous;
      previous = tok.word_index;
      if (!first || !tok.lemma || !tok.upos || (*tok.upos != "NOUN" && *tok.upos != "VERB")) continue;
      const auto w = static_cast<std::size_t>(tok.word_index);
      out.corpus.tokens.push_back({w < words.size() ? words[w] : tok.surface, *tok.lemma, *tok.upos});
      out.token.push_back(sentence.token_offset + t);
    }
  }
  return out;
}

struct GroupTokens {
  std::vector<std::uint64_t> nouns;
  std::vector<std::uint64_t> verbs;
};

std::vector<GroupTokens> tokens_by_group(const ArchiveWords& words, const lexicon::LemmaPartition& partition) {
  std::vector<GroupTokens> out(partition.groups.size());
  for (std::size_t i = 0; i < words.corpus.tokens.size(); ++i) {
    const auto& tok = words.corpus.tokens[i];
    const auto g = static_cast<std::size_t>(*partition.group_of(tok.form));
    (tok.upos == "NOUN" ? out[g].nouns : out[g].verbs).push_back(words.token[i]);
  }
  return out;
}

MatrixXd gather(const LayerView& plane, const std::vector<std::uint64_t>& tokens) {
  MatrixXd m(static_cast<Eigen::Index>(tokens.size()), plane.cols());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = plane.row(static_cast<Eigen::Index>(tokens[i])).cast<double>();
  }
  return m;
}

// Per-lemma seed, independent of scheduling and of other lemmas.
std::uint64_t lemma_seed(std::uint64_t seed, std::int64_t group) {
  return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(group + 1));
}

nlohmann::ordered_json test_json(const std::optional<stats::TestResult>& t) {
  if (!t) return nullptr;
  return {{"kind", stats::test_kind_name(t->kind)},
          {"statistic", t->statistic},
          {"df", t->df},
          {"p_value", t->p_value},
          {"stars", stats::stars(t->p_value)}};
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nullptr; }

}  // namespace

void ingest_conllu(const Context& ctx, const ConlluArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.conllu);
  const auto corpus = corpus_from(args.conllu);
  CsvReport report(prov, {"form", "lemma", "upos"});
  for (const auto& t : corpus.tokens) report.add_row({t.form, t.lemma, t.upos});
  write_output(args.out, report.str());
}

void merge_lemmas(const Context& ctx, const ConlluArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.conllu);
  const auto partition = lexicon::merge_lemmas(corpus_from(args.conllu));
  CsvReport report(prov, {"group_id", "members", "noun_count", "verb_count"});
  for (const auto& g : partition.groups) {
    report.add_row({std::to_string(g.id), members_field(g), std::to_string(g.noun_count), std::to_string(g.verb_count)});
  }
  write_output(args.out, report.str());
}

void flexibility(const Context& ctx, const ConlluArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.conllu);
  const auto partition = lexicon::merge_lemmas(corpus_from(args.conllu));
  const auto table = lexicon::classify_lemmas(partition, ctx.config.thresholds);
  CsvReport report(prov, {"group_id", "members", "noun_count", "verb_count", "flexible", "dominant"});
  for (const auto& row : table.rows) {
    report.add_row({std::to_string(row.group_id), members_field(partition.groups[static_cast<std::size_t>(row.group_id)]),
                    std::to_string(row.noun_count), std::to_string(row.verb_count), bool_field(row.flexible),
                    std::string(lexicon::dominance_name(row.dominant))});
  }
  write_output(args.out, report.str());

  if (!args.summary.empty()) {
    const auto lf = lexicon::language_flexibility(table);
    if (!lexicon::passes_inclusion(lf, ctx.config.inclusion_rate)) {
      ctx.warning("flexibility below the inclusion rate " + format_number(ctx.config.inclusion_rate) +
                  " for nouns or verbs");
    }
    CsvReport summary(prov, {"noun_lemmas", "verb_lemmas", "noun_flexibility", "verb_flexibility", "passes_inclusion"});
    summary.add_row({std::to_string(lf.noun_lemmas), std::to_string(lf.verb_lemmas),
                     format_number(lf.noun_flexibility), format_number(lf.verb_flexibility),
                     bool_field(lexicon::passes_inclusion(lf, ctx.config.inclusion_rate))});
    write_output(args.summary, summary.str());
  }
}

void semshift(const Context& ctx, const SemshiftArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.archive);
  const auto archive = load_archive(args.archive);
  const auto layer = require_layer(ctx, archive);
  const auto plane = slice_layer(archive, layer);
  const auto words = archive_words(archive);
  const auto partition = lexicon::merge_lemmas(words.corpus);
  const auto groups = tokens_by_group(words, partition);

  std::vector<std::optional<semshift::LemmaSemantics>> per_group(groups.size());
  parallel_for(groups.size(), ctx.threads, [&](std::size_t g) {
    const auto& gt = groups[g];
    if (static_cast<std::int64_t>(std::min(gt.nouns.size(), gt.verbs.size())) < ctx.config.min_each) return;
    const semshift::LemmaInstanceSet set{static_cast<std::int64_t>(g), gather(plane, gt.nouns), gather(plane, gt.verbs)};
    per_group[g] = semshift::balanced_lemma_stats(set, lemma_seed(ctx.config.seed, set.group_id), ctx.config.min_each);
  });

  CsvReport report(prov, {"group_id", "members", "noun_count", "verb_count", "dominant", "shift", "noun_variation",
                          "verb_variation"});
  std::vector<semshift::LemmaSemantics> included;
  for (std::size_t g = 0; g < per_group.size(); ++g) {
    if (!per_group[g]) continue;
    const auto& s = *per_group[g];
    report.add_row({std::to_string(s.group_id), members_field(partition.groups[g]), std::to_string(s.noun_count),
                    std::to_string(s.verb_count), std::string(lexicon::dominance_name(s.dominant)),
                    format_number(s.shift), format_number(s.noun_variation), format_number(s.verb_variation)});
    included.push_back(s);
  }
  write_output(args.out, report.str());

  if (included.empty()) throw Error(ErrorCategory::empty, "no lemma has " + std::to_string(ctx.config.min_each) +
                                                              " noun and verb instances");
  const auto lang = semshift::language_semantics(included);
  for (const auto& d : lang.diagnostics) ctx.warning(d);
  if (!args.summary.empty()) {
    nlohmann::ordered_json doc;
    doc["provenance"] = prov.header_line();
    doc["layer"] = layer;
    doc["n_lemmas"] = lang.n_lemmas;
    doc["nvs"] = optional_json(lang.nvs);
    doc["vns"] = optional_json(lang.vns);
    doc["noun_variation"] = lang.noun_variation;
    doc["verb_variation"] = lang.verb_variation;
    doc["majority_variation"] = lang.majority_variation;
    doc["minority_variation"] = lang.minority_variation;
    doc["tests"] = {{"nvs_vs_vns", test_json(lang.shift_test)},
                    {"noun_vs_verb_variation", test_json(lang.noun_verb_test)},
                    {"majority_vs_minority_variation", test_json(lang.majority_minority_test)}};
    doc["diagnostics"] = lang.diagnostics;
    write_output(args.summary, doc.dump(2) + "\n");
  }
}

void probe_corr(const Context& ctx, const ProbeArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.archive);
  prov.add_input(args.human);
  const auto archive = load_archive(args.archive);
  const auto layer = require_layer(ctx, archive);
  const auto plane = slice_layer(archive, layer);
  const auto words = archive_words(archive);
  const auto partition = lexicon::merge_lemmas(words.corpus);
  const auto groups = tokens_by_group(words, partition);
  const auto human = load_csv(args.human);
  const auto word_col = human.column("word"), score_col = human.column("score");

  CsvReport report(prov, {"word", "group_id", "model_distance", "human_score"});
  std::vector<double> model_scores, human_scores;
  for (const auto& row : human.rows) {
    const auto& word = row[word_col];
    const double score = parse_double(row[score_col], "human score for '" + word + "'");
    const auto g = partition.group_of(word);
    if (!g) {
      ctx.warning("word '" + word + "' not found in the archive; skipped");
      continue;
    }
    const auto& gt = groups[static_cast<std::size_t>(*g)];
    if (gt.nouns.empty() || gt.verbs.empty()) {
      ctx.warning("word '" + word + "' lacks noun or verb instances; skipped");
      continue;
    }
    const semshift::LemmaInstanceSet set{*g, gather(plane, gt.nouns), gather(plane, gt.verbs)};
    const double distance = semshift::noun_verb_similarity(set);
    report.add_row({word, std::to_string(*g), format_number(distance), format_number(score)});
    model_scores.push_back(distance);
    human_scores.push_back(score);
  }
  write_output(args.out, report.str());

  const double rho = semshift::probe_correlation(model_scores, human_scores);
  CsvReport summary(prov, {"n_words", "rho", "abs_rho", "orientation"});
  summary.add_row({std::to_string(model_scores.size()), format_number(rho), format_number(std::abs(rho)),
                   "model cosine distance vs human score"});
  write_output(args.summary, summary.str());
}

}  // namespace layerlens::cli
