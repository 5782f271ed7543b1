#include "layerlens/cxn/jabberwocky.hpp"

#include <fstream>

#include "json.hpp"
#include "layerlens/error.hpp"
#include "layerlens/rng.hpp"

namespace layerlens::cxn {

std::string_view construction_name(Construction c) noexcept {
  switch (c) {
    case Construction::ditransitive: return "ditransitive";
    case Construction::resultative: return "resultative";
    case Construction::caused_motion: return "caused-motion";
    case Construction::removal: return "removal";
  }
  return "ditransitive";
}

Construction parse_construction(std::string_view name) {
  for (auto c : kConstructions) {
    if (construction_name(c) == name) return c;
  }
  throw Error(ErrorCategory::validation, "unknown construction '" + std::string(name) + "'");
}

PosLexicon load_pos_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open POS lexicon '" + path + "'");
  PosLexicon lex;
  try {
    const auto doc = nlohmann::json::parse(in);
    lex.nouns = doc.at("nouns").get<std::vector<std::string>>();
    lex.past_verbs = doc.at("past_verbs").get<std::vector<std::string>>();
    lex.adjectives = doc.at("adjectives").get<std::vector<std::string>>();
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(e.byte, std::string("POS lexicon JSON: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::config, std::string("POS lexicon schema: ") + e.what());
  }
  return lex;
}

JabberwockySentence render_jabberwocky(Construction c, bool feminine_subject, std::string_view verb,
                                       bool feminine_object, std::string_view noun, std::string_view adjective) {
  const std::string subject = feminine_subject ? "She" : "He";
  const std::string object = feminine_object ? "her" : "him";
  std::string text = subject + " " + std::string(verb) + " ";
  switch (c) {
    case Construction::ditransitive: text += object + " the " + std::string(noun) + "."; break;
    case Construction::resultative: text += "it " + std::string(adjective) + "."; break;
    case Construction::caused_motion: text += "it on the " + std::string(noun) + "."; break;
    case Construction::removal: text += "it from " + object + "."; break;
  }
  const auto start = subject.size() + 1;
  return {std::move(text), c, std::string(verb), {start, start + verb.size()}, {}};
}

std::vector<JabberwockySentence> generate_jabberwocky(const PosLexicon& lexicon, std::int64_t n_per_construction,
                                                      std::uint64_t seed) {
  if (lexicon.nouns.empty()) throw Error(ErrorCategory::generation, "POS lexicon has no nouns");
  if (lexicon.past_verbs.empty()) throw Error(ErrorCategory::generation, "POS lexicon has no past-tense verbs");
  if (lexicon.adjectives.empty()) throw Error(ErrorCategory::generation, "POS lexicon has no adjectives");
  if (n_per_construction < 1) throw Error(ErrorCategory::validation, "n_per_construction must be >= 1");

  Rng rng(seed);
  auto pick = [&](const std::vector<std::string>& words) -> const std::string& {
    return words[uniform_index(rng, words.size())];
  };
  std::vector<JabberwockySentence> out;
  out.reserve(static_cast<std::size_t>(n_per_construction) * kConstructions.size());
  for (auto c : kConstructions) {
    for (std::int64_t i = 0; i < n_per_construction; ++i) {
      const bool she = uniform_index(rng, 2) == 1;
      const auto& verb = pick(lexicon.past_verbs);
      const bool her = uniform_index(rng, 2) == 1;
      const auto& noun = pick(lexicon.nouns);
      const auto& adjective = pick(lexicon.adjectives);
      out.push_back(render_jabberwocky(c, she, verb, her, noun, adjective));
    }
  }
  return out;
}

}  // namespace layerlens::cxn
