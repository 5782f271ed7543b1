#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "layerlens/types.hpp"

namespace layerlens {

struct TokenRecord {
  std::string surface;
  /// Index of the whitespace-delimited word of the sentence text this sub-token
  /// belongs to, or -1 when untracked.
  std::int64_t word_index = -1;
  std::optional<std::string> lemma;
  std::optional<std::string> upos;
  /// Natural log of the corpus count.
  std::optional<double> log_freq;

  bool operator==(const TokenRecord&) const = default;
};

struct SentenceRecord {
  std::string text;
  std::uint64_t token_offset = 0;
  std::vector<TokenRecord> tokens;
  std::map<std::string, std::string> tags;

  std::size_t size() const noexcept { return tokens.size(); }
  bool operator==(const SentenceRecord&) const = default;
};

/// Token-level contextual vectors for every layer of one model over a corpus.
/// The tensor is row-major over (token, layer, dim).
class EmbeddingArchive {
 public:
  EmbeddingArchive() = default;
  EmbeddingArchive(std::string model_id, std::int64_t num_layers, std::int64_t dim);

  const std::string& model_id() const noexcept { return model_id_; }
  std::int64_t num_layers() const noexcept { return num_layers_; }
  std::int64_t dim() const noexcept { return dim_; }
  std::uint64_t total_tokens() const noexcept;
  const std::vector<SentenceRecord>& sentences() const noexcept { return sentences_; }
  const std::vector<float>& tensor() const noexcept { return tensor_; }

  /// Appends a sentence; `vectors` holds tokens.size() * num_layers * dim floats in
  /// (token, layer, dim) order. token_offset is assigned here.
  void add_sentence(std::string text, std::vector<TokenRecord> tokens,
                    std::map<std::string, std::string> tags, std::span<const float> vectors);

  /// Assembles an archive from already-laid-out parts and validates it.
  static EmbeddingArchive from_parts(std::string model_id, std::int64_t num_layers,
                                     std::int64_t dim, std::vector<SentenceRecord> sentences,
                                     std::vector<float> tensor);

  /// Throws Error(validation) naming the first violated field.
  void validate() const;

  /// D contiguous floats for (token, layer).
  Eigen::Map<const Eigen::RowVectorXf> vector(std::uint64_t token, std::int64_t layer) const;

  /// Exact equality, comparing the tensor bit-for-bit.
  bool operator==(const EmbeddingArchive& other) const;

 private:
  std::string model_id_;
  std::int64_t num_layers_ = 1;
  std::int64_t dim_ = 1;
  std::vector<SentenceRecord> sentences_;
  std::vector<float> tensor_;
};

/// Returns bytes written. Throws Error(io) on sink failure.
std::uint64_t write_archive(const EmbeddingArchive& archive, std::ostream& sink);
/// Throws FormatError with the byte offset of the defect.
EmbeddingArchive read_archive(std::istream& source);

EmbeddingArchive load_archive(const std::string& path);
void save_archive(const EmbeddingArchive& archive, const std::string& path);

/// [total_tokens x dim] view of one layer plane. Throws Error(bounds).
LayerView slice_layer(const EmbeddingArchive& archive, std::int64_t layer);

bool is_valid_upos(std::string_view tag) noexcept;

}  // namespace layerlens
