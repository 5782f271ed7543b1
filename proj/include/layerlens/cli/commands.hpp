#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "layerlens/cli/config.hpp"
#include "layerlens/cli/report.hpp"

namespace layerlens::cli {

struct Context {
  RunConfig config;
  int threads = 1;
  std::ostream* warn = nullptr;

  Provenance provenance() const { return {config.hash(), {}}; }
  void warning(const std::string& message) const;
};

struct ConlluArgs {
  std::string conllu;
  std::string out;
  std::string summary;
};

struct SemshiftArgs {
  std::string archive;
  std::string out;
  std::string summary;
};

struct ProbeArgs {
  std::string archive;
  std::string human;
  std::string out;
  std::string summary;
};

struct GaussFitArgs {
  std::string archive;
  std::string out;
  std::string train_tag;
};

struct GaussScoreArgs {
  std::string model;
  std::string archive;
  std::string out;
  bool tokens = false;
};

struct GaussEvalArgs {
  std::string model;
  std::string archive;
  std::string mlm;
  std::string out;
};

struct GaussGapArgs {
  std::string archive;
  std::string train;
  std::string train_tag;
  std::vector<std::int64_t> layers;
  std::string out;
};

struct GaussFreqArgs {
  std::vector<std::string> models;
  std::string archive;
  std::string out;
};

struct GaussGmmArgs {
  std::string archive;
  std::string train_tag;
  std::string model_out;
  std::string out;
  std::string summary;
};

struct SortGenArgs {
  std::string lexicon;
  std::string out;
};

struct SortRunArgs {
  std::string stimuli;
  std::string archive;
  std::string out;
  std::string summary;
  std::string pca;
  std::string pca_trial;
};

struct JabberGenArgs {
  std::string lexicon;
  std::string out;
};

struct JabberRunArgs {
  std::string stimuli;
  std::string archive;
  std::string prototypes;
  std::string calibration;
  std::string out;
  std::string summary;
};

struct CalibrateArgs {
  std::string archive;
  std::string out;
  std::int64_t max_sentences = 0;
};

void ingest_conllu(const Context& ctx, const ConlluArgs& args);
void merge_lemmas(const Context& ctx, const ConlluArgs& args);
void flexibility(const Context& ctx, const ConlluArgs& args);
void semshift(const Context& ctx, const SemshiftArgs& args);
void probe_corr(const Context& ctx, const ProbeArgs& args);

void gauss_fit(const Context& ctx, const GaussFitArgs& args);
void gauss_score(const Context& ctx, const GaussScoreArgs& args);
void gauss_eval_pairs(const Context& ctx, const GaussEvalArgs& args);
void gauss_gap(const Context& ctx, const GaussGapArgs& args);
void gauss_freq_corr(const Context& ctx, const GaussFreqArgs& args);
void gauss_gmm(const Context& ctx, const GaussGmmArgs& args);

void sort_gen(const Context& ctx, const SortGenArgs& args);
void sort_run(const Context& ctx, const SortRunArgs& args);
void jabber_gen(const Context& ctx, const JabberGenArgs& args);
void jabber_run(const Context& ctx, const JabberRunArgs& args);
void standardize_calibrate(const Context& ctx, const CalibrateArgs& args);

/// Entry point: parses argv, loads the config, runs one subcommand. Returns 0
/// on success, 2 on a usage error, 1 on any other failure; failures print
/// "error[<category>]: <message>" to `err`.
int run(int argc, const char* const* argv, std::ostream& err);

}  // namespace layerlens::cli
