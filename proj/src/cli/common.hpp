#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "layerlens/cli/commands.hpp"
#include "layerlens/embedstore.hpp"
#include "layerlens/error.hpp"
#include "layerlens/sentences.hpp"

namespace layerlens::cli::detail {

inline std::int64_t require_layer(const Context& ctx, const EmbeddingArchive& archive) {
  if (!ctx.config.layer) {
    throw Error(ErrorCategory::config, "no layer given; pass --layer or set \"layer\" in the config");
  }
  if (*ctx.config.layer >= archive.num_layers()) {
    throw Error(ErrorCategory::bounds, "layer " + std::to_string(*ctx.config.layer) + " out of range [0, " +
                                           std::to_string(archive.num_layers()) + ")");
  }
  return *ctx.config.layer;
}

/// Configured layer, or the second-to-last layer when none is set.
inline std::int64_t layer_or_penultimate(const Context& ctx, const EmbeddingArchive& archive) {
  if (ctx.config.layer) return require_layer(ctx, archive);
  return std::max<std::int64_t>(0, archive.num_layers() - 2);
}

/// "key=value" into a one-entry map; empty input gives an empty map.
inline std::map<std::string, std::string> parse_tag(const std::string& tag) {
  if (tag.empty()) return {};
  const auto eq = tag.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCategory::usage, "tag filter '" + tag + "' must look like key=value");
  }
  return {{tag.substr(0, eq), tag.substr(eq + 1)}};
}

/// Training sentences: those matching `tag` when given, otherwise every
/// sentence without a "condition" tag; at most `limit` of them, archive order.
inline std::vector<std::size_t> training_sentences(const EmbeddingArchive& archive, const std::string& tag,
                                                   std::int64_t limit) {
  const auto required = parse_tag(tag);
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < archive.sentences().size(); ++s) {
    if (limit > 0 && static_cast<std::int64_t>(out.size()) >= limit) break;
    const auto& sentence = archive.sentences()[s];
    const bool ok = required.empty() ? !sentence.tags.count("condition") : tags_match(sentence, required);
    if (ok) out.push_back(s);
  }
  return out;
}

inline RowMatrixXf rows_of(const EmbeddingArchive& archive, const std::vector<std::size_t>& sentences,
                           std::int64_t layer, const TokenFilter& filter) {
  std::vector<RowMatrixXf> parts;
  Eigen::Index total = 0;
  for (auto s : sentences) {
    parts.push_back(sentence_rows(archive, s, layer, filter));
    total += parts.back().rows();
  }
  RowMatrixXf out(total, archive.dim());
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.rows()) = p;
    at += p.rows();
  }
  return out;
}

/// First archive sentence with each text.
inline std::map<std::string, std::size_t> sentence_index(const EmbeddingArchive& archive) {
  std::map<std::string, std::size_t> index;
  for (std::size_t s = 0; s < archive.sentences().size(); ++s) index.emplace(archive.sentences()[s].text, s);
  return index;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::int64_t parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCategory::parse, what + ": '" + text + "' is not an integer");
  }
}

inline double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCategory::parse, what + ": '" + text + "' is not a number");
  }
}

}  // namespace layerlens::cli::detail
