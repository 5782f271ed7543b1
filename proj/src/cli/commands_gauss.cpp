#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <variant>

#include "common.hpp"
#include "layerlens/cli/parallel.hpp"
#include "layerlens/gauss/anomaly.hpp"
#include "layerlens/gauss/gmm.hpp"
#include "layerlens/gauss/model_io.hpp"

namespace layerlens::cli {

using namespace detail;
using gauss::GaussianModeld;
using GmmModeld = gauss::GmmModel<double>;

namespace {

using AnyModel = std::variant<GaussianModeld, GmmModeld>;

// LLGM binaries start with their magic; anything else is read as mixture JSON.
AnyModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::io, "cannot open model '" + path + "'");
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::string_view(magic, 4) == "LLGM") return gauss::load_gaussian(path);
  return gauss::load_gmm(path);
}

std::int64_t model_layer(const AnyModel& m) {
  return std::visit(
      [](const auto& model) -> std::int64_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(model)>, GaussianModeld>) {
          return model.layer();
        } else {
          return model.components.front().gaussian.layer();
        }
      },
      m);
}

std::string model_label(const AnyModel& m) {
  if (const auto* g = std::get_if<GaussianModeld>(&m)) return "gaussian-" + std::string(gauss::kind_name(g->kind()));
  return "gmm-k" + std::to_string(std::get<GmmModeld>(m).k());
}

void check_layer(std::int64_t layer, const EmbeddingArchive& archive) {
  if (layer < 0 || layer >= archive.num_layers()) {
    throw Error(ErrorCategory::bounds, "model layer " + std::to_string(layer) + " not in archive with " +
                                           std::to_string(archive.num_layers()) + " layers");
  }
}

RowMatrixXf training_rows(const Context& ctx, const EmbeddingArchive& archive, const std::string& tag,
                          std::int64_t layer) {
  const auto sentences = training_sentences(archive, tag, ctx.config.train_sentences);
  if (sentences.empty()) throw Error(ErrorCategory::empty, "no training sentences selected");
  return rows_of(archive, sentences, layer, ctx.config.tokens);
}

std::vector<std::string> eval_columns() { return {"task", "anomaly_type", "model", "layer", "n_pairs", "accuracy"}; }

template <typename Model>
void add_eval_rows(CsvReport& report, const Context& ctx, const Model& model, const std::string& label,
                   std::int64_t layer, const EmbeddingArchive& archive) {
  for (const auto& data : gauss::paired_datasets(archive)) {
    const double acc = gauss::minimal_pair_eval(model, data, archive, layer, ctx.config.agg, ctx.config.tokens);
    report.add_row({data.task, std::string(gauss::anomaly_type_name(data.anomaly_type)), label, std::to_string(layer),
                    std::to_string(data.pairs.size()), format_number(acc)});
  }
}

}  // namespace

void gauss_fit(const Context& ctx, const GaussFitArgs& args) {
  const auto archive = load_archive(args.archive);
  const auto layer = require_layer(ctx, archive);
  const auto rows = training_rows(ctx, archive, args.train_tag, layer);
  const auto model = gauss::fit_gaussian(rows, ctx.config.covariance, ctx.config.ridge, layer);
  gauss::save_gaussian(model, args.out);
}

void gauss_score(const Context& ctx, const GaussScoreArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.model);
  prov.add_input(args.archive);
  const auto model = load_model(args.model);
  const auto archive = load_archive(args.archive);
  const auto layer = model_layer(model);
  check_layer(layer, archive);

  if (args.tokens) {
    CsvReport report(prov, {"sentence", "token", "surface", "surprisal", "log_freq"});
    for (std::size_t s = 0; s < archive.sentences().size(); ++s) {
      const auto kept = kept_tokens(archive, s, ctx.config.tokens);
      const auto rows = sentence_rows(archive, s, layer, ctx.config.tokens);
      if (kept.empty()) continue;
      const VectorXd values = std::visit([&](const auto& m) { return VectorXd(gauss::token_surprisals(m, rows)); }, model);
      const auto& sentence = archive.sentences()[s];
      for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto& tok = sentence.tokens[kept[i] - sentence.token_offset];
        report.add_row({std::to_string(s), std::to_string(kept[i] - sentence.token_offset), tok.surface,
                        format_number(values(static_cast<Eigen::Index>(i))), format_number(tok.log_freq)});
      }
    }
    write_output(args.out, report.str());
    return;
  }
  CsvReport report(prov, {"sentence", "text", "n_tokens", "surprisal"});
  for (std::size_t s = 0; s < archive.sentences().size(); ++s) {
    const auto rows = sentence_rows(archive, s, layer, ctx.config.tokens);
    if (rows.rows() == 0) {
      ctx.warning("sentence " + std::to_string(s) + " has no scored tokens; skipped");
      continue;
    }
    const double value = std::visit(
        [&](const auto& m) { return static_cast<double>(gauss::sentence_surprisal(m, rows, ctx.config.agg)); }, model);
    report.add_row({std::to_string(s), archive.sentences()[s].text, std::to_string(rows.rows()), format_number(value)});
  }
  write_output(args.out, report.str());
}

void gauss_eval_pairs(const Context& ctx, const GaussEvalArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.model);
  prov.add_input(args.archive);
  if (!args.mlm.empty()) prov.add_input(args.mlm);
  const auto model = load_model(args.model);
  const auto archive = load_archive(args.archive);
  const auto layer = model_layer(model);
  check_layer(layer, archive);

  CsvReport report(prov, eval_columns());
  std::visit([&](const auto& m) { add_eval_rows(report, ctx, m, model_label(model), layer, archive); }, model);

  if (!args.mlm.empty()) {
    const auto table = load_csv(args.mlm);
    const auto id = table.column("pair_id"), good = table.column("logp_correct"), bad = table.column("logp_anomalous");
    std::vector<gauss::MlmScore> scores;
    for (const auto& row : table.rows) {
      scores.push_back({row[id], parse_double(row[good], "logp_correct"), parse_double(row[bad], "logp_anomalous")});
    }
    for (const auto& data : gauss::paired_datasets(archive)) {
      std::set<std::string> ids;
      for (const auto& p : data.pairs) ids.insert(p.pair_id);
      std::vector<gauss::MlmScore> subset;
      for (const auto& s : scores) {
        if (ids.count(s.pair_id)) subset.push_back(s);
      }
      if (subset.empty()) continue;
      report.add_row({data.task, std::string(gauss::anomaly_type_name(data.anomaly_type)), "mlm", "",
                      std::to_string(subset.size()), format_number(gauss::mlm_accuracy(subset))});
    }
    if (!scores.empty()) {
      report.add_row({"all", "", "mlm", "", std::to_string(scores.size()), format_number(gauss::mlm_accuracy(scores))});
    }
  }
  write_output(args.out, report.str());
}

void gauss_gap(const Context& ctx, const GaussGapArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.archive);
  if (!args.train.empty()) prov.add_input(args.train);
  const auto archive = load_archive(args.archive);
  const auto train = args.train.empty() ? archive : load_archive(args.train);
  if (train.dim() != archive.dim() || train.num_layers() != archive.num_layers()) {
    throw Error(ErrorCategory::shape, "training and evaluation archives differ in layers or dimension");
  }
  std::vector<std::int64_t> layers = args.layers;
  if (layers.empty()) {
    for (std::int64_t l = 0; l < archive.num_layers(); ++l) layers.push_back(l);
  }
  for (auto l : layers) check_layer(l, archive);
  const auto datasets = gauss::paired_datasets(archive);
  if (datasets.empty()) throw Error(ErrorCategory::empty, "archive has no tagged minimal pairs");

  // results[layer][dataset]
  std::vector<std::vector<gauss::GapResult>> results(layers.size());
  parallel_for(layers.size(), ctx.threads, [&](std::size_t i) {
    const auto rows = training_rows(ctx, train, args.train_tag, layers[i]);
    const std::vector<GaussianModeld> model{
        gauss::fit_gaussian(rows, ctx.config.covariance, ctx.config.ridge, layers[i])};
    for (const auto& data : datasets) {
      results[i].push_back(gauss::surprisal_gap(std::span<const GaussianModeld>(model), data, archive, ctx.config.agg,
                                                ctx.config.tokens));
    }
  });

  CsvReport report(prov, {"task", "anomaly_type", "layer", "n_pairs", "mean_diff", "sd_diff", "gap"});
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& r = results[i][d];
      for (const auto& diag : r.diagnostics) ctx.warning(r.task + ": " + diag);
      report.add_row({r.task, std::string(gauss::anomaly_type_name(r.anomaly_type)), std::to_string(layers[i]),
                      std::to_string(datasets[d].pairs.size()), format_number(r.mean_diff[0]),
                      format_number(r.sd_diff[0]), format_number(r.per_layer_gap[0])});
    }
  }
  write_output(args.out, report.str());
}

void gauss_freq_corr(const Context& ctx, const GaussFreqArgs& args) {
  auto prov = ctx.provenance();
  for (const auto& m : args.models) prov.add_input(m);
  prov.add_input(args.archive);
  const auto archive = load_archive(args.archive);
  CsvReport report(prov, {"model", "layer", "n_tokens", "pearson_r"});
  for (const auto& path : args.models) {
    const auto model = load_model(path);
    const auto layer = model_layer(model);
    check_layer(layer, archive);
    std::vector<double> surprisal, freq;
    for (std::size_t s = 0; s < archive.sentences().size(); ++s) {
      const auto& sentence = archive.sentences()[s];
      std::vector<std::uint64_t> with_freq;
      for (auto t : kept_tokens(archive, s, ctx.config.tokens)) {
        const auto& tok = sentence.tokens[t - sentence.token_offset];
        if (tok.log_freq) {
          with_freq.push_back(t);
          freq.push_back(*tok.log_freq);
        }
      }
      if (with_freq.empty()) continue;
      RowMatrixXf rows(static_cast<Eigen::Index>(with_freq.size()), archive.dim());
      for (std::size_t i = 0; i < with_freq.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = archive.vector(with_freq[i], layer);
      const VectorXd values = std::visit([&](const auto& m) { return VectorXd(gauss::token_surprisals(m, rows)); }, model);
      surprisal.insert(surprisal.end(), values.data(), values.data() + values.size());
    }
    std::optional<double> r;
    try {
      r = gauss::frequency_correlation(surprisal, freq);
    } catch (const Error& e) {
      ctx.warning(std::string(std::filesystem::path(path).filename()) + ": " + e.what());
    }
    report.add_row({std::filesystem::path(path).filename().string(), std::to_string(layer),
                    std::to_string(surprisal.size()), format_number(r)});
  }
  write_output(args.out, report.str());
}

void gauss_gmm(const Context& ctx, const GaussGmmArgs& args) {
  auto prov = ctx.provenance();
  prov.add_input(args.archive);
  const auto archive = load_archive(args.archive);
  const auto layer = require_layer(ctx, archive);
  const auto rows = training_rows(ctx, archive, args.train_tag, layer);
  gauss::GmmOptions opt;
  opt.max_iter = ctx.config.max_iter;
  opt.tol = ctx.config.tol;
  opt.seed = ctx.config.seed;
  opt.ridge = ctx.config.ridge;
  opt.layer = layer;
  const auto model = gauss::fit_gmm(rows, ctx.config.gmm_k, opt);
  for (const auto& d : model.diagnostics) ctx.warning(d);
  if (!model.converged) ctx.warning("EM stopped after " + std::to_string(ctx.config.max_iter) + " iterations without converging");
  if (!args.model_out.empty()) gauss::save_gmm(model, args.model_out);

  CsvReport report(prov, eval_columns());
  add_eval_rows(report, ctx, model, "gmm-k" + std::to_string(model.k()), layer, archive);
  write_output(args.out, report.str());

  if (!args.summary.empty()) {
    CsvReport summary(prov, {"k", "layer", "iterations", "converged", "final_loglik", "reseeds"});
    summary.add_row({std::to_string(model.k()), std::to_string(layer), std::to_string(model.loglik_trace.size()),
                     model.converged ? "true" : "false", format_number(model.final_loglik),
                     std::to_string(model.reseeded_at.size())});
    write_output(args.summary, summary.str());
  }
}

}  // namespace layerlens::cli
