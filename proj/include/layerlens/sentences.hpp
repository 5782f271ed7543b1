#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <string>
#include <vector>

#include "layerlens/embedstore.hpp"
#include "layerlens/types.hpp"

namespace layerlens {

/// Which sub-tokens of a sentence take part in sentence-level statistics.
struct TokenFilter {
  bool include_special = false;
  std::vector<std::string> special_tokens = {"<s>", "</s>", "<pad>", "<cls>", "<sep>", "<unk>",
                                             "[CLS]", "[SEP]", "[PAD]", "[UNK]"};

  bool keep(const TokenRecord& token) const;
};

/// Global token indices of the kept tokens of one sentence.
std::vector<std::uint64_t> kept_tokens(const EmbeddingArchive& archive, std::size_t sentence,
                                       const TokenFilter& filter);

/// Kept token vectors of one sentence at one layer, one row per token.
RowMatrixXf sentence_rows(const EmbeddingArchive& archive, std::size_t sentence, std::int64_t layer,
                          const TokenFilter& filter);

/// True when every key/value in `required` matches the sentence's tags.
bool tags_match(const SentenceRecord& sentence, const std::map<std::string, std::string>& required);

/// Stacks kept token rows of the first `max_sentences` sentences whose tags
/// match `required` (max_sentences <= 0 means all).
RowMatrixXf stacked_rows(const EmbeddingArchive& archive, std::int64_t layer, const TokenFilter& filter,
                         const std::map<std::string, std::string>& required = {},
                         std::int64_t max_sentences = 0);

/// Whitespace-delimited words of a sentence text.
std::vector<std::string> split_words(std::string_view text);

/// Global index of the first sub-token with the given word_index in a sentence.
std::optional<std::uint64_t> first_subtoken(const EmbeddingArchive& archive, std::size_t sentence,
                                            std::int64_t word_index);

}  // namespace layerlens
