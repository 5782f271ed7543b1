#pragma once

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "layerlens/embedstore.hpp"

namespace layerlens::fixtures {

namespace fs = std::filesystem;

struct WordInfo {
  std::optional<std::string> lemma;
  std::optional<std::string> upos;
};

struct TextSpec {
  std::string text;
  std::map<std::string, std::string> tags;
};

inline std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

inline std::string normalize(const std::string& word) {
  std::string out;
  for (unsigned char c : word) {
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

// One token per whitespace word. A word's vector is a fixed per-word base
// plus a small per-occurrence perturbation; `shift` adds a per-sentence offset.
inline EmbeddingArchive build_archive(const std::string& model, int layers, int dim,
                                      const std::vector<TextSpec>& texts,
                                      const std::function<WordInfo(const std::string&)>& info, std::uint64_t seed,
                                      const std::function<double(const TextSpec&)>& shift = {}) {
  EmbeddingArchive archive(model, layers, dim);
  std::mt19937_64 noise_rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (const auto& spec : texts) {
    const auto words = split_words(spec.text);
    std::vector<TokenRecord> tokens;
    std::vector<float> vecs;
    const double offset = shift ? shift(spec) : 0.0;
    for (std::size_t w = 0; w < words.size(); ++w) {
      const auto key = normalize(words[w]);
      const auto wi = info(words[w]);
      TokenRecord tok;
      tok.surface = words[w];
      tok.word_index = static_cast<std::int64_t>(w);
      tok.lemma = wi.lemma;
      tok.upos = wi.upos;
      tok.log_freq = -1.0 - static_cast<double>(key.size()) / 4.0;
      tokens.push_back(tok);
      std::mt19937_64 base_rng(std::hash<std::string>{}(key) ^ 0x5bd1e995u);
      std::normal_distribution<double> base(0.0, 1.0);
      const double pos_sign = wi.upos == std::optional<std::string>("VERB") ? 1.0 : -1.0;
      for (int l = 0; l < layers; ++l) {
        for (int d = 0; d < dim; ++d) {
          const double depth = static_cast<double>(l) / static_cast<double>(layers);
          const double v = base(base_rng) + noise(noise_rng) + (d == 0 ? pos_sign * depth : 0.0) + offset * depth;
          vecs.push_back(static_cast<float>(v));
        }
      }
    }
    archive.add_sentence(spec.text, tokens, spec.tags, vecs);
  }
  return archive;
}

inline WordInfo toy_word_info(const std::string& word) {
  static const std::map<std::string, std::string> verbs_of = {{"runs", "run"}, {"walks", "walk"}, {"cooks", "cook"},
                                                              {"drinks", "drink"}, {"dances", "dance"}, {"paints", "paint"}};
  static const std::vector<std::string> lemmas = {"run", "walk", "cook", "drink", "dance", "paint"};
  const auto key = normalize(word);
  if (auto it = verbs_of.find(key); it != verbs_of.end()) return {it->second, "VERB"};
  for (const auto& l : lemmas) {
    if (key == l) return {l, std::nullopt};
  }
  if (key == "the" || key == "a") return {key, "DET"};
  if (key == "she" || key == "he" || key == "they") return {key, "PRON"};
  return {key, "ADJ"};
}

// Training corpus with noun and verb uses of each lemma, plus two tasks of
// tagged minimal pairs whose anomalous member is shifted away.
inline EmbeddingArchive toy_corpus_archive(int layers = 13, int dim = 5) {
  const std::vector<std::string> lemmas = {"run", "walk", "cook", "drink", "dance", "paint"};
  const std::vector<std::string> adjs = {"long", "quick", "late", "odd"};
  std::vector<TextSpec> texts;
  for (int i = 0; i < 8; ++i) {
    for (const auto& l : lemmas) {
      texts.push_back({"the " + l + " was " + adjs[static_cast<std::size_t>(i) % adjs.size()], {}});
      texts.push_back({(i % 2 ? "she " : "he ") + l + "s " + adjs[static_cast<std::size_t>(i + 1) % adjs.size()], {}});
    }
  }
  const std::vector<std::pair<std::string, std::string>> tasks = {{"agreement", "morphosyntactic"},
                                                                  {"animacy", "semantic"}};
  for (const auto& [task, type] : tasks) {
    for (int p = 0; p < 8; ++p) {
      const auto& l = lemmas[static_cast<std::size_t>(p) % lemmas.size()];
      const std::string id = task.substr(0, 3) + std::to_string(p);
      texts.push_back({"she " + l + "s " + adjs[static_cast<std::size_t>(p) % adjs.size()],
                       {{"task", task}, {"anomaly_type", type}, {"pair_id", id}, {"condition", "control"}}});
      texts.push_back({"she " + l + " " + adjs[static_cast<std::size_t>(p) % adjs.size()],
                       {{"task", task}, {"anomaly_type", type}, {"pair_id", id}, {"condition", "anomalous"}}});
    }
  }
  // Bare lemmas after "the" are nouns; "<lemma>s" after a pronoun are verbs.
  auto info = [&](const std::string& word) {
    auto wi = toy_word_info(word);
    if (wi.lemma && !wi.upos) wi.upos = "NOUN";
    return wi;
  };
  return build_archive("toy-encoder", layers, dim, texts, info, 7, [](const TextSpec& s) {
    const auto it = s.tags.find("condition");
    return it != s.tags.end() && it->second == "anomalous" ? 4.0 : 0.0;
  });
}

inline WordInfo plain_word_info(const std::string& word) { return {normalize(word), std::nullopt}; }

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string mlm_csv() {
  std::string out = "pair_id,logp_correct,logp_anomalous\n";
  for (int p = 0; p < 8; ++p) {
    out += "agr" + std::to_string(p) + ",-" + std::to_string(2 + p % 3) + ".5,-" + std::to_string(3 + p % 2) + ".25\n";
    out += "ani" + std::to_string(p) + ",-4.0,-" + std::to_string(3 + p % 3) + ".0\n";
  }
  return out;
}

// Sentences using every prototype verb, for prototype lookup.
inline std::vector<TextSpec> prototype_texts() {
  const std::vector<std::string> verbs = {"gave", "made", "put", "took", "handed", "turned", "placed", "removed"};
  std::vector<TextSpec> texts;
  for (int i = 0; i < 3; ++i) {
    for (const auto& v : verbs) texts.push_back({(i % 2 ? "She " : "He ") + v + " it on the table.", {}});
  }
  return texts;
}

}  // namespace layerlens::fixtures
