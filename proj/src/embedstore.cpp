#include "layerlens/embedstore.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "layerlens/error.hpp"

namespace layerlens {
namespace {

using json = nlohmann::json;

constexpr std::array<char, 4> kMagic = {'L', 'L', 'E', 'B'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kPreambleBytes = 16;

Error invalid(const std::string& field, const std::string& why) {
  return Error(ErrorCategory::validation, "invalid archive field '" + field + "': " + why);
}

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const unsigned char* bytes) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= std::uint64_t{bytes[i]} << (8 * i);
  return static_cast<T>(value);
}

void floats_to_le(std::span<const float> values, char* out) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out, values.data(), values.size_bytes());
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(values[i]);
      for (int b = 0; b < 4; ++b) out[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
  }
}

void le_to_floats(const char* in, std::span<float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(values.data(), in, values.size_bytes());
  } else {
    const auto* bytes = reinterpret_cast<const unsigned char*>(in);
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes + 4 * i));
    }
  }
}

json header_json(const EmbeddingArchive& archive) {
  json sentences = json::array();
  for (const auto& s : archive.sentences()) {
    json tokens = json::array();
    for (const auto& t : s.tokens) {
      tokens.push_back({{"surface", t.surface},
                        {"word_index", t.word_index},
                        {"lemma", t.lemma ? json(*t.lemma) : json(nullptr)},
                        {"upos", t.upos ? json(*t.upos) : json(nullptr)},
                        {"log_freq", t.log_freq ? json(*t.log_freq) : json(nullptr)}});
    }
    sentences.push_back(
        {{"text", s.text}, {"token_offset", s.token_offset}, {"tags", s.tags}, {"tokens", tokens}});
  }
  return {{"model_id", archive.model_id()},
          {"num_layers", archive.num_layers()},
          {"dim", archive.dim()},
          {"sentences", sentences}};
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

EmbeddingArchive::EmbeddingArchive(std::string model_id, std::int64_t num_layers, std::int64_t dim)
    : model_id_(std::move(model_id)), num_layers_(num_layers), dim_(dim) {
  if (num_layers_ < 1) throw invalid("num_layers", "must be >= 1");
  if (dim_ < 1) throw invalid("dim", "must be >= 1");
}

std::uint64_t EmbeddingArchive::total_tokens() const noexcept {
  std::uint64_t total = 0;
  for (const auto& s : sentences_) total += s.tokens.size();
  return total;
}

void EmbeddingArchive::add_sentence(std::string text, std::vector<TokenRecord> tokens,
                                    std::map<std::string, std::string> tags,
                                    std::span<const float> vectors) {
  const auto per_token = static_cast<std::size_t>(num_layers_ * dim_);
  if (tokens.empty()) throw invalid("sentences.tokens", "sentence has no tokens");
  if (vectors.size() != tokens.size() * per_token) {
    throw Error(ErrorCategory::shape, "add_sentence: expected " +
                                          std::to_string(tokens.size() * per_token) +
                                          " floats, got " + std::to_string(vectors.size()));
  }
  SentenceRecord record{std::move(text), total_tokens(), std::move(tokens), std::move(tags)};
  sentences_.push_back(std::move(record));
  tensor_.insert(tensor_.end(), vectors.begin(), vectors.end());
}

EmbeddingArchive EmbeddingArchive::from_parts(std::string model_id, std::int64_t num_layers,
                                              std::int64_t dim,
                                              std::vector<SentenceRecord> sentences,
                                              std::vector<float> tensor) {
  EmbeddingArchive archive(std::move(model_id), num_layers, dim);
  archive.sentences_ = std::move(sentences);
  archive.tensor_ = std::move(tensor);
  archive.validate();
  return archive;
}

void EmbeddingArchive::validate() const {
  if (num_layers_ < 1) throw invalid("num_layers", "must be >= 1");
  if (dim_ < 1) throw invalid("dim", "must be >= 1");
  std::uint64_t expected_offset = 0;
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    const auto& s = sentences_[i];
    const std::string where = "sentences[" + std::to_string(i) + "]";
    if (s.tokens.empty()) throw invalid(where + ".tokens", "must be nonempty");
    if (s.token_offset != expected_offset) {
      throw invalid(where + ".token_offset", "expected " + std::to_string(expected_offset) +
                                                 ", got " + std::to_string(s.token_offset));
    }
    for (std::size_t t = 0; t < s.tokens.size(); ++t) {
      const auto& tok = s.tokens[t];
      const std::string twhere = where + ".tokens[" + std::to_string(t) + "]";
      if (tok.surface.empty()) throw invalid(twhere + ".surface", "must be nonempty");
      if (tok.word_index < -1) throw invalid(twhere + ".word_index", "must be >= -1");
      if (tok.upos && !is_valid_upos(*tok.upos)) {
        throw invalid(twhere + ".upos", "'" + *tok.upos + "' is not a UPOS tag");
      }
    }
    expected_offset += s.tokens.size();
  }
  const auto expected_floats = expected_offset * static_cast<std::uint64_t>(num_layers_ * dim_);
  if (tensor_.size() != expected_floats) {
    throw invalid("tensor", "expected " + std::to_string(expected_floats) + " values, got " +
                                std::to_string(tensor_.size()));
  }
  for (std::size_t i = 0; i < tensor_.size(); ++i) {
    if (!std::isfinite(tensor_[i])) {
      throw invalid("tensor", "non-finite value at index " + std::to_string(i));
    }
  }
}

Eigen::Map<const Eigen::RowVectorXf> EmbeddingArchive::vector(std::uint64_t token,
                                                             std::int64_t layer) const {
  if (token >= total_tokens()) throw Error(ErrorCategory::bounds, "token index out of range");
  if (layer < 0 || layer >= num_layers_) {
    throw Error(ErrorCategory::bounds, "layer " + std::to_string(layer) + " out of range [0, " +
                                           std::to_string(num_layers_) + ")");
  }
  const auto offset = (token * static_cast<std::uint64_t>(num_layers_) + layer) * dim_;
  return {tensor_.data() + offset, static_cast<Eigen::Index>(dim_)};
}

bool EmbeddingArchive::operator==(const EmbeddingArchive& other) const {
  return model_id_ == other.model_id_ && num_layers_ == other.num_layers_ &&
         dim_ == other.dim_ && sentences_ == other.sentences_ &&
         tensor_.size() == other.tensor_.size() &&
         std::memcmp(tensor_.data(), other.tensor_.data(), tensor_.size() * sizeof(float)) == 0;
}

std::uint64_t write_archive(const EmbeddingArchive& archive, std::ostream& sink) {
  archive.validate();
  const std::string header = header_json(archive).dump();
  std::string preamble(kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(preamble, kVersion);
  put_le<std::uint64_t>(preamble, header.size());

  const auto& tensor = archive.tensor();
  std::string blob(tensor.size() * sizeof(float), '\0');
  floats_to_le(tensor, blob.data());

  sink.write(preamble.data(), static_cast<std::streamsize>(preamble.size()));
  sink.write(header.data(), static_cast<std::streamsize>(header.size()));
  sink.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!sink) throw Error(ErrorCategory::io, "failed writing archive");
  return preamble.size() + header.size() + blob.size();
}

EmbeddingArchive read_archive(std::istream& source) {
  std::array<unsigned char, kPreambleBytes> pre{};
  source.read(reinterpret_cast<char*>(pre.data()), 4);
  if (source.gcount() < 4 || std::memcmp(pre.data(), kMagic.data(), 4) != 0) {
    throw FormatError(0, "bad magic, expected \"LLEB\"");
  }
  source.read(reinterpret_cast<char*>(pre.data()) + 4, kPreambleBytes - 4);
  if (source.gcount() < static_cast<std::streamsize>(kPreambleBytes - 4)) {
    throw FormatError(4 + source.gcount(), "truncated preamble");
  }
  const auto version = get_le<std::uint32_t>(pre.data() + 4);
  if (version != kVersion) {
    throw FormatError(4, "unsupported version " + std::to_string(version));
  }
  const auto header_len = get_le<std::uint64_t>(pre.data() + 8);

  std::string header(header_len, '\0');
  source.read(header.data(), static_cast<std::streamsize>(header_len));
  if (static_cast<std::uint64_t>(source.gcount()) != header_len) {
    throw FormatError(kPreambleBytes + source.gcount(),
                      "truncated header: expected " + std::to_string(header_len) +
                          " bytes, got " + std::to_string(source.gcount()));
  }

  json j;
  try {
    j = json::parse(header);
  } catch (const json::parse_error& e) {
    throw FormatError(kPreambleBytes + e.byte, std::string("header JSON: ") + e.what());
  }

  std::string model_id;
  std::int64_t num_layers = 0;
  std::int64_t dim = 0;
  std::vector<SentenceRecord> sentences;
  try {
    model_id = j.at("model_id").get<std::string>();
    num_layers = j.at("num_layers").get<std::int64_t>();
    dim = j.at("dim").get<std::int64_t>();
    for (const auto& js : j.at("sentences")) {
      SentenceRecord s;
      s.text = js.at("text").get<std::string>();
      s.token_offset = js.at("token_offset").get<std::uint64_t>();
      if (js.contains("tags")) s.tags = js.at("tags").get<std::map<std::string, std::string>>();
      for (const auto& jt : js.at("tokens")) {
        TokenRecord t;
        t.surface = jt.at("surface").get<std::string>();
        t.word_index = jt.value("word_index", std::int64_t{-1});
        t.lemma = optional_field<std::string>(jt, "lemma");
        t.upos = optional_field<std::string>(jt, "upos");
        t.log_freq = optional_field<double>(jt, "log_freq");
        s.tokens.push_back(std::move(t));
      }
      sentences.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw FormatError(kPreambleBytes, std::string("header schema: ") + e.what());
  }
  if (num_layers < 1 || dim < 1) throw FormatError(kPreambleBytes, "num_layers and dim must be >= 1");

  std::uint64_t total_tokens = 0;
  for (const auto& s : sentences) total_tokens += s.tokens.size();
  const std::uint64_t count = total_tokens * static_cast<std::uint64_t>(num_layers * dim);
  const std::uint64_t tensor_offset = kPreambleBytes + header_len;

  std::vector<float> tensor(count);
  std::string blob(count * sizeof(float), '\0');
  source.read(blob.data(), static_cast<std::streamsize>(blob.size()));
  const auto got = static_cast<std::uint64_t>(source.gcount());
  if (got != blob.size()) {
    throw FormatError(tensor_offset + got, "truncated tensor: expected " +
                                               std::to_string(blob.size()) + " bytes, got " +
                                               std::to_string(got));
  }
  le_to_floats(blob.data(), tensor);
  if (source.peek() != std::char_traits<char>::eof()) {
    throw FormatError(tensor_offset + blob.size(), "trailing bytes after tensor");
  }

  try {
    return EmbeddingArchive::from_parts(std::move(model_id), num_layers, dim,
                                        std::move(sentences), std::move(tensor));
  } catch (const Error& e) {
    throw FormatError(kPreambleBytes, e.what());
  }
}

EmbeddingArchive load_archive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::io, "cannot open archive '" + path + "'");
  return read_archive(in);
}

void save_archive(const EmbeddingArchive& archive, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::io, "cannot create archive '" + path + "'");
  write_archive(archive, out);
  out.flush();
  if (!out) throw Error(ErrorCategory::io, "failed writing archive '" + path + "'");
}

LayerView slice_layer(const EmbeddingArchive& archive, std::int64_t layer) {
  if (layer < 0 || layer >= archive.num_layers()) {
    throw Error(ErrorCategory::bounds, "layer " + std::to_string(layer) + " out of range [0, " +
                                           std::to_string(archive.num_layers()) + ")");
  }
  const auto rows = static_cast<Eigen::Index>(archive.total_tokens());
  const auto cols = static_cast<Eigen::Index>(archive.dim());
  const auto stride = static_cast<Eigen::Index>(archive.num_layers() * archive.dim());
  return LayerView(archive.tensor().data() + layer * archive.dim(), rows, cols,
                   Eigen::OuterStride<>(stride));
}

bool is_valid_upos(std::string_view tag) noexcept {
  static constexpr std::array<std::string_view, 17> kTags = {
      "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
      "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};
  for (auto t : kTags) {
    if (t == tag) return true;
  }
  return false;
}

}  // namespace layerlens
