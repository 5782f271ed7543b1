#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>

#include "common.hpp"
#include "layerlens/cli/parallel.hpp"
#include "layerlens/cxn/congruence.hpp"
#include "layerlens/cxn/jabberwocky.hpp"
#include "layerlens/cxn/pca.hpp"
#include "layerlens/cxn/sorting.hpp"
#include "layerlens/cxn/standardize.hpp"
#include "layerlens/stats/ttest.hpp"

namespace layerlens::cli {

using namespace detail;

namespace {

std::string normalized_word(std::string_view word) {
  std::size_t b = 0, e = word.size();
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80; };
  while (b < e && !alnum(word[b])) ++b;
  while (e > b && !alnum(word[e - 1])) --e;
  std::string out(word.substr(b, e - b));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t label(const std::string& text, const std::string& what) {
  const auto v = parse_int(text, what);
  if (v < 0 || v > 3) throw Error(ErrorCategory::validation, what + " must be in 0..3, got " + text);
  return static_cast<std::size_t>(v);
}

VectorXd sentence_vector(const EmbeddingArchive& archive, std::size_t sentence, std::int64_t layer,
                         const TokenFilter& filter) {
  const auto rows = sentence_rows(archive, sentence, layer, filter);
  if (rows.rows() == 0) {
    throw Error(ErrorCategory::empty, "sentence '" + archive.sentences()[sentence].text + "' has no kept tokens");
  }
  return cxn::sentence_embedding(rows);
}

std::size_t lookup(const std::map<std::string, std::size_t>& index, const std::string& text) {
  const auto it = index.find(text);
  if (it == index.end()) throw Error(ErrorCategory::lookup, "sentence not in archive: '" + text + "'");
  return it->second;
}

}  // namespace

void sort_gen(const Context& ctx, const SortGenArgs& args) {
  auto prov = ctx.provenance();
  if (!args.lexicon.empty()) prov.add_input(args.lexicon);
  const auto lex = args.lexicon.empty() ? cxn::default_sorting_lexicon() : cxn::load_sorting_lexicon(args.lexicon);
  const auto trials = cxn::generate_sorting_trials(lex, ctx.config.trials, ctx.config.seed);
  CsvReport report(prov, {"trial_id", "sentence", "verb_label", "construction_label"});
  for (const auto& t : trials) {
    for (const auto& s : t.sentences) {
      report.add_row({std::to_string(t.trial_id), s.text, std::to_string(s.verb_label),
                      std::to_string(s.construction_label)});
    }
  }
  write_output(args.out, report.str());
}

void sort_run(const Context& ctx, const SortRunArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.stimuli);
  prov.add_input(args.archive);
  const auto stimuli = load_csv(args.stimuli);
  const auto archive = load_archive(args.archive);
  const auto layer = layer_or_penultimate(ctx, archive);
  const auto index = sentence_index(archive);
  const auto c_trial = stimuli.column("trial_id"), c_text = stimuli.column("sentence"),
             c_verb = stimuli.column("verb_label"), c_cxn = stimuli.column("construction_label");

  std::vector<cxn::SortingTrial> trials;
  std::vector<std::string> trial_names;
  std::map<std::string, std::size_t> trial_of;
  std::vector<std::vector<std::size_t>> archive_rows;
  for (const auto& row : stimuli.rows) {
    const auto [it, inserted] = trial_of.emplace(row[c_trial], trials.size());
    if (inserted) {
      trials.emplace_back();
      trials.back().trial_id = static_cast<std::int64_t>(trials.size() - 1);
      trial_names.push_back(row[c_trial]);
      archive_rows.emplace_back();
    }
    auto& trial = trials[it->second];
    trial.sentences.push_back({row[c_text], static_cast<int>(label(row[c_verb], "verb_label")),
                               static_cast<int>(label(row[c_cxn], "construction_label"))});
    archive_rows[it->second].push_back(lookup(index, row[c_text]));
  }
  for (std::size_t t = 0; t < trials.size(); ++t) {
    if (trials[t].sentences.size() != 16) {
      throw Error(ErrorCategory::validation, "trial " + trial_names[t] + " has " +
                                                 std::to_string(trials[t].sentences.size()) + " sentences, expected 16");
    }
  }

  parallel_for(trials.size(), ctx.threads, [&](std::size_t t) {
    auto& trial = trials[t];
    trial.embeddings.resize(16, archive.dim());
    for (std::size_t i = 0; i < 16; ++i) {
      trial.embeddings.row(static_cast<Eigen::Index>(i)) =
          sentence_vector(archive, archive_rows[t][i], layer, ctx.config.tokens).transpose();
    }
    cxn::evaluate_trial(trial, ctx.config.linkage);
  });

  CsvReport report(prov, {"trial_id", "cdev", "vdev", "assignment"});
  for (std::size_t t = 0; t < trials.size(); ++t) {
    std::vector<std::string> labels;
    for (int c : trials[t].cluster_assignment) labels.push_back(std::to_string(c));
    report.add_row({trial_names[t], std::to_string(trials[t].cdev), std::to_string(trials[t].vdev), join(labels, " ")});
  }
  write_output(args.out, report.str());

  if (!args.summary.empty()) {
    const auto s = cxn::summarize_deviations(trials);
    CsvReport summary(prov, {"n_trials", "layer", "linkage", "mean_cdev", "cdev_ci95_half_width", "mean_vdev",
                             "vdev_ci95_half_width"});
    summary.add_row({std::to_string(s.n), std::to_string(layer), std::string(cxn::linkage_name(ctx.config.linkage)),
                     format_number(s.mean_cdev), format_number(s.cdev_half_width), format_number(s.mean_vdev),
                     format_number(s.vdev_half_width)});
    write_output(args.summary, summary.str());
  }

  if (!args.pca.empty()) {
    const std::string wanted = args.pca_trial.empty() ? trial_names.front() : args.pca_trial;
    const auto it = trial_of.find(wanted);
    if (it == trial_of.end()) throw Error(ErrorCategory::lookup, "no trial '" + wanted + "' for PCA");
    const auto& trial = trials[it->second];
    const auto p = cxn::pca_project(trial.embeddings, 2);
    CsvReport pca(prov, {"trial_id", "sentence", "verb_label", "construction_label", "pc1", "pc2", "explained_pc1",
                         "explained_pc2"});
    for (std::size_t i = 0; i < trial.sentences.size(); ++i) {
      const auto& s = trial.sentences[i];
      const auto r = static_cast<Eigen::Index>(i);
      pca.add_row({wanted, s.text, std::to_string(s.verb_label), std::to_string(s.construction_label),
                   format_number(p.scores(r, 0)), format_number(p.scores(r, 1)), format_number(p.explained_ratio(0)),
                   format_number(p.explained_ratio(1))});
    }
    write_output(args.pca, pca.str());
  }
}

void jabber_gen(const Context& ctx, const JabberGenArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.lexicon);
  const auto lex = cxn::load_pos_lexicon(args.lexicon);
  const auto sentences = cxn::generate_jabberwocky(lex, ctx.config.n_per_construction, ctx.config.seed);
  CsvReport report(prov, {"sentence", "construction", "verb_surface", "verb_char_span"});
  for (const auto& s : sentences) {
    report.add_row({s.text, std::string(cxn::construction_name(s.construction)), s.verb_surface,
                    std::to_string(s.verb_span.first) + ":" + std::to_string(s.verb_span.second)});
  }
  write_output(args.out, report.str());
}

void jabber_run(const Context& ctx, const JabberRunArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.stimuli);
  prov.add_input(args.archive);
  prov.add_input(args.prototypes);
  if (!args.calibration.empty()) prov.add_input(args.calibration);
  const auto stimuli = load_csv(args.stimuli);
  const auto archive = load_archive(args.archive);
  const auto corpus = load_archive(args.prototypes);
  if (corpus.dim() != archive.dim() || corpus.num_layers() != archive.num_layers()) {
    throw Error(ErrorCategory::shape, "prototype archive differs from the stimulus archive in layers or dimension");
  }
  const auto layer = layer_or_penultimate(ctx, archive);
  const auto index = sentence_index(archive);
  const auto c_text = stimuli.column("sentence"), c_cxn = stimuli.column("construction"),
             c_span = stimuli.column("verb_char_span");

  std::array<std::vector<VectorXd>, 4> verb_rows;
  for (const auto& row : stimuli.rows) {
    const auto c = static_cast<std::size_t>(cxn::parse_construction(row[c_cxn]));
    const auto& text = row[c_text];
    const auto colon = row[c_span].find(':');
    if (colon == std::string::npos) throw Error(ErrorCategory::parse, "verb_char_span '" + row[c_span] + "' is not start:end");
    const auto start = static_cast<std::size_t>(parse_int(row[c_span].substr(0, colon), "verb_char_span"));
    if (start > text.size()) throw Error(ErrorCategory::bounds, "verb_char_span beyond sentence '" + text + "'");
    const auto word = static_cast<std::int64_t>(split_words(std::string_view(text).substr(0, start)).size());
    const auto s = lookup(index, text);
    const auto token = first_subtoken(archive, s, word);
    if (!token) throw Error(ErrorCategory::lookup, "no token for the verb of '" + text + "'");
    verb_rows[c].push_back(archive.vector(*token, layer).cast<double>().transpose());
  }
  std::vector<MatrixXd> by_construction;
  for (std::size_t c = 0; c < 4; ++c) {
    if (verb_rows[c].empty()) {
      throw Error(ErrorCategory::empty, "no stimuli for construction " +
                                            std::string(cxn::construction_name(cxn::kConstructions[c])));
    }
    MatrixXd m(static_cast<Eigen::Index>(verb_rows[c].size()), archive.dim());
    for (std::size_t i = 0; i < verb_rows[c].size(); ++i) m.row(static_cast<Eigen::Index>(i)) = verb_rows[c][i].transpose();
    by_construction.push_back(std::move(m));
  }

  const auto& verbs = cxn::prototype_verbs(ctx.config.frequency);
  std::array<std::vector<VectorXd>, 4> occurrences;
  for (std::size_t s = 0; s < corpus.sentences().size(); ++s) {
    const auto words = split_words(corpus.sentences()[s].text);
    for (std::size_t w = 0; w < words.size(); ++w) {
      const auto norm = normalized_word(words[w]);
      for (std::size_t v = 0; v < 4; ++v) {
        if (norm != verbs[v]) continue;
        if (const auto tok = first_subtoken(corpus, s, static_cast<std::int64_t>(w))) {
          occurrences[v].push_back(corpus.vector(*tok, layer).cast<double>().transpose());
        }
      }
    }
  }
  std::vector<VectorXd> prototypes;
  for (std::size_t v = 0; v < 4; ++v) {
    if (occurrences[v].empty()) throw Error(ErrorCategory::lookup, "prototype verb '" + verbs[v] + "' never occurs");
    MatrixXd m(static_cast<Eigen::Index>(occurrences[v].size()), corpus.dim());
    for (std::size_t i = 0; i < occurrences[v].size(); ++i) m.row(static_cast<Eigen::Index>(i)) = occurrences[v][i].transpose();
    prototypes.push_back(cxn::prototype_verb(m));
  }

  std::optional<cxn::StandardizationCalibration> cal;
  if (!args.calibration.empty()) cal = cxn::load_calibration(args.calibration);
  const auto result = cxn::congruence_matrix(by_construction, prototypes, {0, 1, 2, 3}, cal ? &*cal : nullptr,
                                             ctx.config.frequency);
  for (const auto& d : result.diagnostics) ctx.warning(d);

  CsvReport report(prov, {"construction", "prototype", "mean_distance", "congruent"});
  for (int c = 0; c < 4; ++c) {
    for (int v = 0; v < 4; ++v) {
      report.add_row({std::string(cxn::construction_name(cxn::kConstructions[static_cast<std::size_t>(c)])),
                      verbs[static_cast<std::size_t>(v)], format_number(result.mean_distance(c, v)),
                      result.pairing[static_cast<std::size_t>(c)] == v ? "true" : "false"});
    }
  }
  write_output(args.out, report.str());

  if (!args.summary.empty()) {
    CsvReport summary(prov, {"frequency", "layer", "standardized", "n_sentences", "congruent_mean", "incongruent_mean",
                             "t", "df", "p_value", "stars"});
    std::size_t n = 0;
    for (const auto& m : by_construction) n += static_cast<std::size_t>(m.rows());
    summary.add_row({std::string(cxn::frequency_name(result.frequency_condition)), std::to_string(layer),
                     cal ? "true" : "false", std::to_string(n), format_number(result.congruent_mean),
                     format_number(result.incongruent_mean),
                     result.test ? format_number(result.test->statistic) : "",
                     result.test ? format_number(result.test->df) : "", format_number(result.p_value),
                     result.p_value ? std::string(stats::stars(*result.p_value)) : ""});
    write_output(args.summary, summary.str());
  }
}

void standardize_calibrate(const Context& ctx, const CalibrateArgs& args) {
  const auto archive = load_archive(args.archive);
  const auto layer = require_layer(ctx, archive);
  std::vector<std::size_t> sentences;
  for (std::size_t s = 0; s < archive.sentences().size(); ++s) {
    if (args.max_sentences > 0 && static_cast<std::int64_t>(s) >= args.max_sentences) break;
    sentences.push_back(s);
  }
  const auto rows = rows_of(archive, sentences, layer, ctx.config.tokens);
  const auto cal = cxn::fit_calibration(rows, std::filesystem::path(args.archive).filename().string() + "@layer" +
                                                  std::to_string(layer));
  cxn::save_calibration(cal, args.out);
}

}  // namespace layerlens::cli
