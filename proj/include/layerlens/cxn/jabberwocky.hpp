#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "layerlens/types.hpp"

namespace layerlens::cxn {

enum class Construction { ditransitive = 0, resultative = 1, caused_motion = 2, removal = 3 };

constexpr std::array<Construction, 4> kConstructions = {Construction::ditransitive, Construction::resultative,
                                                        Construction::caused_motion, Construction::removal};

std::string_view construction_name(Construction c) noexcept;
Construction parse_construction(std::string_view name);

/// Words drawn into the templates.
struct PosLexicon {
  std::vector<std::string> nouns;
  std::vector<std::string> past_verbs;
  std::vector<std::string> adjectives;
};

PosLexicon load_pos_lexicon(const std::string& path);

struct JabberwockySentence {
  std::string text;
  Construction construction = Construction::ditransitive;
  std::string verb_surface;
  /// Byte range [first, second) of the verb in `text`.
  std::pair<std::size_t, std::size_t> verb_span{0, 0};
  VectorXd verb_embedding;  // filled after extraction
};

/// Instantiates one template:
///   ditransitive   "S/he V him/her the N."
///   resultative    "S/he V it Adj."
///   caused-motion  "S/he V it on the N."
///   removal        "S/he V it from him/her."
/// `feminine_subject` picks She/He, `feminine_object` her/him.
JabberwockySentence render_jabberwocky(Construction c, bool feminine_subject, std::string_view verb,
                                       bool feminine_object, std::string_view noun, std::string_view adjective);

/// `n_per_construction` sentences per construction, constructions in the order
/// of kConstructions. Every draw is uniform and seeded.
std::vector<JabberwockySentence> generate_jabberwocky(const PosLexicon& lexicon, std::int64_t n_per_construction,
                                                      std::uint64_t seed);

}  // namespace layerlens::cxn
