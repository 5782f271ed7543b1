#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <thread>
#include <tuple>

#include "CLI11.hpp"
#include "layerlens/cli/commands.hpp"
#include "layerlens/cli/parallel.hpp"
#include "layerlens/cxn/clustering.hpp"
#include "layerlens/error.hpp"

#ifndef LAYERLENS_VERSION
#define LAYERLENS_VERSION "0.0.0"
#endif

namespace layerlens::cli {

int thread_budget() {
  const int hardware = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const char* env = std::getenv("LAYERLENS_THREADS");
  if (env == nullptr || *env == '\0') return hardware;
  char* end = nullptr;
  const long cap = std::strtol(env, &end, 10);
  if (*end != '\0' || cap < 1) {
    throw Error(ErrorCategory::config, std::string("LAYERLENS_THREADS must be a positive integer, got '") + env + "'");
  }
  return static_cast<int>(std::min<long>(cap, hardware));
}

namespace {

struct Overrides {
  std::string config;
  std::optional<std::int64_t> layer;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> covariance;
  std::optional<std::string> agg;
  std::optional<std::string> linkage;
  std::optional<std::string> frequency;
  std::optional<double> ridge;
  std::optional<std::int64_t> min_each;
  std::optional<std::int64_t> train_sentences;
  std::optional<int> k;
  std::optional<std::int64_t> trials;
  std::optional<std::int64_t> n;
  bool include_special = false;

  void add_to(CLI::App& app) {
    app.add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--layer", layer, "Layer index");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--covariance", covariance, "full | diag | spherical");
    app.add_option("--agg", agg, "Sentence aggregation: sum | max");
    app.add_option("--linkage", linkage, "ward | complete | average | single");
    app.add_option("--frequency", frequency, "Prototype verb set: high | low");
    app.add_option("--ridge", ridge, "Relative covariance ridge");
    app.add_option("--min-each", min_each, "Minimum noun and verb instances per lemma");
    app.add_option("--train-sentences", train_sentences, "Training sentence cap");
    app.add_option("--k", k, "Mixture components");
    app.add_option("--trials", trials, "Sorting trials to generate");
    app.add_option("--n", n, "Jabberwocky sentences per construction");
    app.add_flag("--include-special", include_special, "Keep special tokens in sentence statistics");
  }

  RunConfig resolve() const {
    RunConfig c = config.empty() ? RunConfig{} : load_config(config);
    if (layer) c.layer = *layer;
    if (seed) c.seed = *seed;
    if (covariance) c.covariance = gauss::parse_kind(*covariance);
    if (agg) c.agg = gauss::parse_aggregation(*agg);
    if (linkage) c.linkage = cxn::parse_linkage(*linkage);
    if (frequency) c.frequency = cxn::parse_frequency(*frequency);
    if (ridge) c.ridge = *ridge;
    if (min_each) c.min_each = *min_each;
    if (train_sentences) c.train_sentences = *train_sentences;
    if (k) c.gmm_k = *k;
    if (trials) c.trials = *trials;
    if (n) c.n_per_construction = *n;
    if (include_special) c.tokens.include_special = true;
    c.validate();
    return c;
  }
};

const std::set<std::string> kCommands = {"ingest-conllu", "merge-lemmas", "flexibility", "semshift",
                                         "probe-corr",    "gauss",        "sort",        "jabber",
                                         "standardize-calibrate"};

void print_error(std::ostream& err, ErrorCategory category, const std::string& message) {
  err << "error[" << category_name(category) << "]: " << message << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& err) {
  CLI::App app{"Layerwise probing of contextual embeddings", "layerlens"};
  app.set_version_flag("--version", LAYERLENS_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  Overrides ov;
  ov.add_to(app);

  std::function<void(const Context&)> action;
  const auto in = CLI::ExistingFile;

  ConlluArgs conllu;
  for (const auto& [name, fn, doc] :
       {std::tuple{"ingest-conllu", &ingest_conllu, "Parse CoNLL-U into a token CSV"},
        std::tuple{"merge-lemmas", &cli::merge_lemmas, "Merge lemmas with shared forms"},
        std::tuple{"flexibility", &cli::flexibility, "Noun/verb flexibility per lemma group"}}) {
    auto* sub = app.add_subcommand(name, doc);
    sub->add_option("--conllu", conllu.conllu, "CoNLL-U input")->required()->check(in);
    sub->add_option("--out", conllu.out, "Report path (default stdout)");
    if (std::string_view(name) == "flexibility") sub->add_option("--summary", conllu.summary, "Language summary CSV");
    sub->callback([&action, &conllu, fn = fn] { action = [&conllu, fn](const Context& c) { fn(c, conllu); }; });
  }

  SemshiftArgs sem;
  auto* sem_cmd = app.add_subcommand("semshift", "Prototype shift and variation per lemma");
  sem_cmd->add_option("--archive", sem.archive, "Embedding archive")->required()->check(in);
  sem_cmd->add_option("--out", sem.out, "Per-lemma CSV (default stdout)");
  sem_cmd->add_option("--summary", sem.summary, "Language summary JSON");
  sem_cmd->callback([&] { action = [&](const Context& c) { semshift(c, sem); }; });

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe-corr", "Correlate noun/verb distances with human ratings");
  probe_cmd->add_option("--archive", probe.archive, "Embedding archive")->required()->check(in);
  probe_cmd->add_option("--human", probe.human, "CSV with word,score")->required()->check(in);
  probe_cmd->add_option("--out", probe.out, "Per-word CSV (default stdout)");
  probe_cmd->add_option("--summary", probe.summary, "Correlation CSV (default stdout)");
  probe_cmd->callback([&] { action = [&](const Context& c) { probe_corr(c, probe); }; });

  auto* gauss_cmd = app.add_subcommand("gauss", "Gaussian surprisal models");
  gauss_cmd->require_subcommand(1);
  gauss_cmd->fallthrough();

  GaussFitArgs fit;
  auto* fit_cmd = gauss_cmd->add_subcommand("fit", "Fit a Gaussian at one layer");
  fit_cmd->add_option("--archive", fit.archive, "Training archive")->required()->check(in);
  fit_cmd->add_option("--out", fit.out, "Model file")->required();
  fit_cmd->add_option("--train-tag", fit.train_tag, "Select training sentences by tag key=value");
  fit_cmd->callback([&] { action = [&](const Context& c) { gauss_fit(c, fit); }; });

  GaussScoreArgs score;
  auto* score_cmd = gauss_cmd->add_subcommand("score", "Sentence or token surprisal");
  score_cmd->add_option("--model", score.model, "Gaussian or mixture model")->required()->check(in);
  score_cmd->add_option("--archive", score.archive, "Archive to score")->required()->check(in);
  score_cmd->add_option("--out", score.out, "Report path (default stdout)");
  score_cmd->add_flag("--tokens", score.tokens, "One row per token");
  score_cmd->callback([&] { action = [&](const Context& c) { gauss_score(c, score); }; });

  GaussEvalArgs eval;
  auto* eval_cmd = gauss_cmd->add_subcommand("eval-pairs", "Minimal-pair accuracy");
  eval_cmd->add_option("--model", eval.model, "Gaussian or mixture model")->required()->check(in);
  eval_cmd->add_option("--archive", eval.archive, "Archive with tagged pairs")->required()->check(in);
  eval_cmd->add_option("--mlm", eval.mlm, "CSV pair_id,logp_correct,logp_anomalous")->check(in);
  eval_cmd->add_option("--out", eval.out, "Report path (default stdout)");
  eval_cmd->callback([&] { action = [&](const Context& c) { gauss_eval_pairs(c, eval); }; });

  GaussGapArgs gap;
  auto* gap_cmd = gauss_cmd->add_subcommand("gap", "Layerwise surprisal gap");
  gap_cmd->add_option("--archive", gap.archive, "Archive with tagged pairs")->required()->check(in);
  gap_cmd->add_option("--train", gap.train, "Training archive (default: --archive)")->check(in);
  gap_cmd->add_option("--train-tag", gap.train_tag, "Select training sentences by tag key=value");
  gap_cmd->add_option("--layers", gap.layers, "Layers to evaluate (default all)");
  gap_cmd->add_option("--out", gap.out, "Report path (default stdout)");
  gap_cmd->callback([&] { action = [&](const Context& c) { gauss_gap(c, gap); }; });

  GaussFreqArgs freq;
  auto* freq_cmd = gauss_cmd->add_subcommand("freq-corr", "Surprisal vs log frequency");
  freq_cmd->add_option("--model", freq.models, "One or more models")->required()->check(in);
  freq_cmd->add_option("--archive", freq.archive, "Archive with log_freq")->required()->check(in);
  freq_cmd->add_option("--out", freq.out, "Report path (default stdout)");
  freq_cmd->callback([&] { action = [&](const Context& c) { gauss_freq_corr(c, freq); }; });

  GaussGmmArgs gmm;
  auto* gmm_cmd = gauss_cmd->add_subcommand("gmm", "Fit a Gaussian mixture and evaluate pairs");
  gmm_cmd->add_option("--archive", gmm.archive, "Training archive")->required()->check(in);
  gmm_cmd->add_option("--train-tag", gmm.train_tag, "Select training sentences by tag key=value");
  gmm_cmd->add_option("--model-out", gmm.model_out, "Mixture JSON");
  gmm_cmd->add_option("--out", gmm.out, "Pair accuracy CSV (default stdout)");
  gmm_cmd->add_option("--summary", gmm.summary, "Fit summary CSV");
  gmm_cmd->callback([&] { action = [&](const Context& c) { gauss_gmm(c, gmm); }; });

  auto* sort_cmd = app.add_subcommand("sort", "Sentence sorting trials");
  sort_cmd->require_subcommand(1);
  sort_cmd->fallthrough();
  SortGenArgs sgen;
  auto* sgen_cmd = sort_cmd->add_subcommand("gen", "Generate templated trials");
  sgen_cmd->add_option("--lexicon", sgen.lexicon, "Sorting lexicon JSON (default built-in)")->check(in);
  sgen_cmd->add_option("--out", sgen.out, "Stimuli CSV (default stdout)");
  sgen_cmd->callback([&] { action = [&](const Context& c) { sort_gen(c, sgen); }; });
  SortRunArgs srun;
  auto* srun_cmd = sort_cmd->add_subcommand("run", "Cluster trials and score deviations");
  srun_cmd->add_option("--stimuli", srun.stimuli, "Stimuli CSV")->required()->check(in);
  srun_cmd->add_option("--archive", srun.archive, "Embeddings of the stimuli")->required()->check(in);
  srun_cmd->add_option("--out", srun.out, "Per-trial CSV (default stdout)");
  srun_cmd->add_option("--summary", srun.summary, "Summary CSV");
  srun_cmd->add_option("--pca", srun.pca, "PCA coordinates CSV");
  srun_cmd->add_option("--pca-trial", srun.pca_trial, "Trial id for PCA (default first)");
  srun_cmd->callback([&] { action = [&](const Context& c) { sort_run(c, srun); }; });

  auto* jab_cmd = app.add_subcommand("jabber", "Jabberwocky construction probes");
  jab_cmd->require_subcommand(1);
  jab_cmd->fallthrough();
  JabberGenArgs jgen;
  auto* jgen_cmd = jab_cmd->add_subcommand("gen", "Generate Jabberwocky sentences");
  jgen_cmd->add_option("--lexicon", jgen.lexicon, "JSON with nouns, past_verbs, adjectives")->required()->check(in);
  jgen_cmd->add_option("--out", jgen.out, "Stimuli CSV (default stdout)");
  jgen_cmd->callback([&] { action = [&](const Context& c) { jabber_gen(c, jgen); }; });
  JabberRunArgs jrun;
  auto* jrun_cmd = jab_cmd->add_subcommand("run", "Distances to prototype verbs");
  jrun_cmd->add_option("--stimuli", jrun.stimuli, "Stimuli CSV")->required()->check(in);
  jrun_cmd->add_option("--archive", jrun.archive, "Embeddings of the stimuli")->required()->check(in);
  jrun_cmd->add_option("--prototypes", jrun.prototypes, "Corpus archive for prototype verbs")->required()->check(in);
  jrun_cmd->add_option("--calibration", jrun.calibration, "Standardization JSON")->check(in);
  jrun_cmd->add_option("--out", jrun.out, "Matrix CSV (default stdout)");
  jrun_cmd->add_option("--summary", jrun.summary, "Summary CSV");
  jrun_cmd->callback([&] { action = [&](const Context& c) { jabber_run(c, jrun); }; });

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("standardize-calibrate", "Per-dimension mean and std from an archive");
  cal_cmd->add_option("--archive", cal.archive, "Reference archive")->required()->check(in);
  cal_cmd->add_option("--out", cal.out, "Calibration JSON")->required();
  cal_cmd->add_option("--max-sentences", cal.max_sentences, "Sentence cap (0 = all)");
  cal_cmd->callback([&] { action = [&](const Context& c) { standardize_calibrate(c, cal); }; });

  if (argc > 1 && argv[1][0] != '-' && !kCommands.count(argv[1])) {
    err << app.help();
    print_error(err, ErrorCategory::usage, std::string("unknown subcommand '") + argv[1] + "'");
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, std::cout, err);
    print_error(err, ErrorCategory::usage, e.what());
    err << "run 'layerlens --help' for usage\n";
    return 2;
  }

  try {
    Context ctx;
    ctx.config = ov.resolve();
    ctx.warn = &err;
    for (const auto& w : ctx.config.warnings) ctx.warning(w);
    ctx.threads = thread_budget();
    action(ctx);
  } catch (const Error& e) {
    print_error(err, e.category(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(err, ErrorCategory::io, e.what());
    return 1;
  }
  return 0;
}

}  // namespace layerlens::cli
