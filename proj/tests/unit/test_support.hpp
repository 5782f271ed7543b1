#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "layerlens/embedstore.hpp"

namespace layerlens::testing {

/// Random valid archive with mixed optional token metadata.
inline EmbeddingArchive random_archive(std::mt19937_64& rng, int max_sentences = 5) {
  std::uniform_int_distribution<int> layers_d(1, 4), dim_d(1, 6), sent_d(0, max_sentences), tok_d(1, 5), pick(0, 3);
  std::normal_distribution<float> value(0.0f, 3.0f);
  const int layers = layers_d(rng);
  const int dim = dim_d(rng);
  EmbeddingArchive a("model-" + std::to_string(rng() % 1000), layers, dim);
  const int n_sent = sent_d(rng);
  const std::vector<std::string> upos = {"NOUN", "VERB", "DET", "PUNCT"};
  for (int s = 0; s < n_sent; ++s) {
    const int n_tok = tok_d(rng);
    std::vector<TokenRecord> tokens;
    for (int t = 0; t < n_tok; ++t) {
      TokenRecord tok;
      tok.surface = "tok\"" + std::to_string(rng() % 100) + (pick(rng) == 0 ? "\xc3\xa9" : "");
      tok.word_index = pick(rng) == 0 ? -1 : t;
      if (pick(rng) != 0) tok.lemma = "lem" + std::to_string(t);
      if (pick(rng) != 0) tok.upos = upos[pick(rng)];
      if (pick(rng) != 0) tok.log_freq = std::log(1.0 + static_cast<double>(rng() % 100000)) / 3.0;
      tokens.push_back(tok);
    }
    std::vector<float> vecs(static_cast<std::size_t>(n_tok * layers * dim));
    for (auto& v : vecs) v = value(rng);
    std::map<std::string, std::string> tags;
    if (pick(rng) != 0) tags["task"] = "t" + std::to_string(s % 2);
    if (pick(rng) != 0) tags["condition"] = s % 2 ? "control" : "anomalous";
    a.add_sentence("sentence, \"quoted\" " + std::to_string(s), tokens, tags, vecs);
  }
  return a;
}

inline std::string to_bytes(const EmbeddingArchive& a) {
  std::ostringstream out(std::ios::binary);
  write_archive(a, out);
  return out.str();
}

inline EmbeddingArchive from_bytes(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_archive(in);
}

}  // namespace layerlens::testing
