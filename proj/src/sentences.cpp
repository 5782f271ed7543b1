#include "layerlens/sentences.hpp"

#include <algorithm>

#include "layerlens/error.hpp"

namespace layerlens {

bool TokenFilter::keep(const TokenRecord& token) const {
  if (include_special) return true;
  return std::find(special_tokens.begin(), special_tokens.end(), token.surface) == special_tokens.end();
}

std::vector<std::uint64_t> kept_tokens(const EmbeddingArchive& archive, std::size_t sentence,
                                       const TokenFilter& filter) {
  if (sentence >= archive.sentences().size()) {
    throw Error(ErrorCategory::lookup, "sentence " + std::to_string(sentence) + " not in archive");
  }
  const auto& s = archive.sentences()[sentence];
  std::vector<std::uint64_t> out;
  for (std::size_t t = 0; t < s.tokens.size(); ++t) {
    if (filter.keep(s.tokens[t])) out.push_back(s.token_offset + t);
  }
  return out;
}

RowMatrixXf sentence_rows(const EmbeddingArchive& archive, std::size_t sentence, std::int64_t layer,
                          const TokenFilter& filter) {
  const auto tokens = kept_tokens(archive, sentence, filter);
  RowMatrixXf rows(static_cast<Eigen::Index>(tokens.size()), archive.dim());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = archive.vector(tokens[i], layer);
  }
  return rows;
}

bool tags_match(const SentenceRecord& sentence, const std::map<std::string, std::string>& required) {
  for (const auto& [key, value] : required) {
    const auto it = sentence.tags.find(key);
    if (it == sentence.tags.end() || it->second != value) return false;
  }
  return true;
}

RowMatrixXf stacked_rows(const EmbeddingArchive& archive, std::int64_t layer, const TokenFilter& filter,
                         const std::map<std::string, std::string>& required, std::int64_t max_sentences) {
  std::vector<std::uint64_t> tokens;
  std::int64_t used = 0;
  for (std::size_t s = 0; s < archive.sentences().size(); ++s) {
    if (max_sentences > 0 && used >= max_sentences) break;
    if (!tags_match(archive.sentences()[s], required)) continue;
    const auto kept = kept_tokens(archive, s, filter);
    tokens.insert(tokens.end(), kept.begin(), kept.end());
    ++used;
  }
  RowMatrixXf rows(static_cast<Eigen::Index>(tokens.size()), archive.dim());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = archive.vector(tokens[i], layer);
  }
  return rows;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r')) ++i;
    const auto start = i;
    while (i < text.size() && !(text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r')) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

std::optional<std::uint64_t> first_subtoken(const EmbeddingArchive& archive, std::size_t sentence,
                                            std::int64_t word_index) {
  const auto& s = archive.sentences().at(sentence);
  for (std::size_t t = 0; t < s.tokens.size(); ++t) {
    if (s.tokens[t].word_index == word_index) return s.token_offset + t;
  }
  return std::nullopt;
}

}  // namespace layerlens
