#include "layerlens/cxn/sorting.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>

#include "json.hpp"
#include "layerlens/cxn/deviation.hpp"
#include "layerlens/rng.hpp"
#include "layerlens/stats/correlation.hpp"
#include "layerlens/stats/tdist.hpp"

namespace layerlens::cxn {
namespace {

constexpr int kDesign = 4;

SortingLexicon build_default_lexicon() {
  SortingLexicon lex;
  lex.function_words = {"the", "into", "onto"};
  lex.names = {"Harry", "Henry", "Eric",  "Sam",    "John",  "Thomas", "Mike",  "Frank", "Michael", "James",
               "George", "Adam", "Paul",  "Bill",   "Bob",   "Tom",    "Andrew", "Steve", "Jack",   "David",
               "Mary",  "Anna",  "Lucy",  "Kate",   "Emma",  "Sarah",  "Laura", "Alice", "Grace",   "Helen",
               "Peter", "Mark",  "Chris", "Nick",   "Ruth",  "Jane",   "Rose",  "Amy",   "Ben",     "Dan"};
  const std::vector<std::string> goals = {"onto the bed",   "into the house",  "into the water", "onto the table",
                                          "into the garden", "onto the roof",  "into the street", "onto the floor",
                                          "into the river", "onto the shelf",  "into the yard",  "onto the porch",
                                          "into the hall",  "onto the grass"};
  auto verb = [&](std::string lemma, std::string past, std::vector<std::string> objects,
                  std::vector<std::string> results) {
    lex.verbs.push_back({std::move(lemma), std::move(past), std::move(objects), goals, std::move(results)});
  };
  verb("cut", "cut", {"bread", "rope", "paper", "cake", "ribbon", "cheese", "apple", "cloth", "string", "pie"},
       {"apart", "open", "loose", "short", "free"});
  verb("hit", "hit", {"ball", "wall", "door", "table", "drum", "car", "window", "fence", "bell", "box"},
       {"flat", "open", "down", "loose", "over"});
  verb("get", "got", {"book", "ball", "box", "chair", "bag", "key", "lamp", "coat", "letter", "door"},
       {"stuck", "wet", "clean", "ready", "free"});
  verb("kick", "kicked", {"ball", "box", "door", "can", "wall", "bucket", "stone", "chair", "tire", "bag"},
       {"open", "shut", "down", "over", "loose"});
  verb("pull", "pulled", {"rope", "door", "cart", "chair", "wagon", "sled", "lever", "drawer", "cord", "box"},
       {"open", "shut", "loose", "free", "tight"});
  verb("punch", "punched", {"bag", "wall", "door", "pillow", "box", "window", "cushion", "board", "sack", "dummy"},
       {"flat", "open", "loose", "down", "in"});
  verb("push", "pushed", {"cart", "door", "box", "chair", "car", "table", "stroller", "wagon", "crate", "bike"},
       {"open", "shut", "over", "down", "aside"});
  verb("slice", "sliced", {"bread", "apple", "cake", "cheese", "ham", "melon", "onion", "tomato", "pie", "lemon"},
       {"apart", "thin", "open", "flat", "free"});
  verb("tear", "tore", {"paper", "letter", "cloth", "shirt", "page", "ticket", "map", "poster", "note", "bag"},
       {"apart", "open", "loose", "free", "off"});
  verb("throw", "threw", {"ball", "stone", "box", "book", "pillow", "key", "bottle", "hat", "shoe", "cup"},
       {"open", "down", "away", "aside", "over"});
  return lex;
}

// Fillers for one sentence of a column besides the subject name.
struct Filler {
  std::string recipient;  // ditransitive only
  std::string object;
  std::string extra;      // goal or result
};

std::string render(SortConstruction c, const std::string& name, const SortingVerb& v, const Filler& f) {
  switch (c) {
    case SortConstruction::transitive: return name + " " + v.past + " the " + f.object + ".";
    case SortConstruction::ditransitive: return name + " " + v.past + " " + f.recipient + " the " + f.object + ".";
    case SortConstruction::caused_motion: return name + " " + v.past + " the " + f.object + " " + f.extra + ".";
    case SortConstruction::resultative: return name + " " + v.past + " the " + f.object + " " + f.extra + ".";
  }
  return {};
}

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::none_of(a.begin(), a.end(), [&](const std::string& w) { return b.count(w) > 0; });
}

}  // namespace

const SortingLexicon& default_sorting_lexicon() {
  static const SortingLexicon lexicon = build_default_lexicon();
  return lexicon;
}

SortingLexicon load_sorting_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open sorting lexicon '" + path + "'");
  SortingLexicon lex;
  try {
    const auto doc = nlohmann::json::parse(in);
    lex.names = doc.at("names").get<std::vector<std::string>>();
    const auto fw = doc.value("function_words", std::vector<std::string>{"the", "into", "onto"});
    lex.function_words = {fw.begin(), fw.end()};
    for (const auto& v : doc.at("verbs")) {
      lex.verbs.push_back({v.at("lemma").get<std::string>(), v.at("past").get<std::string>(),
                           v.at("objects").get<std::vector<std::string>>(),
                           v.at("goals").get<std::vector<std::string>>(),
                           v.at("results").get<std::vector<std::string>>()});
    }
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(e.byte, std::string("sorting lexicon JSON: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::config, std::string("sorting lexicon schema: ") + e.what());
  }
  return lex;
}

std::set<std::string> content_words(std::string_view sentence, const std::set<std::string>& function_words) {
  std::set<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && function_words.count(current) == 0) words.insert(current);
    current.clear();
  };
  for (char ch : sentence) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isalnum(u) || u >= 0x80 || ch == '\'' || ch == '-') {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else {
      flush();
    }
  }
  flush();
  return words;
}

std::vector<SortingTrial> generate_sorting_trials(const SortingLexicon& lexicon, std::int64_t n_trials,
                                                  std::uint64_t seed) {
  if (n_trials < 1) throw Error(ErrorCategory::validation, "generate_sorting_trials: n_trials must be >= 1");
  if (lexicon.verbs.size() < kDesign) {
    throw Error(ErrorCategory::generation, "sorting lexicon needs at least 4 verbs");
  }
  constexpr std::size_t kNamesPerTrial = 20;  // 16 subjects + 4 ditransitive recipients
  if (lexicon.names.size() < kNamesPerTrial) {
    throw Error(ErrorCategory::generation, "sorting lexicon needs at least 20 names");
  }

  Rng rng(seed);
  std::vector<SortingTrial> trials;
  for (std::int64_t t = 0; t < n_trials; ++t) {
    SortingTrial trial;
    trial.trial_id = t;
    const auto picks = sample_without_replacement(rng, lexicon.verbs.size(), kDesign);
    std::vector<const SortingVerb*> verbs;
    for (auto p : picks) {
      verbs.push_back(&lexicon.verbs[p]);
      trial.verbs.push_back(lexicon.verbs[p].lemma);
    }
    auto names = lexicon.names;
    shuffle(rng, names);
    std::size_t next_name = 0;

    std::array<std::array<std::string, kDesign>, kDesign> texts;  // [verb][construction]
    for (int c = 0; c < kDesign; ++c) {
      const auto cxn = static_cast<SortConstruction>(c);
      std::array<std::string, kDesign> subjects;
      std::array<std::string, kDesign> recipients;
      std::set<std::string> used;
      for (int v = 0; v < kDesign; ++v) {
        subjects[v] = names[next_name++];
        used.merge(content_words(subjects[v], lexicon.function_words));
        used.merge(content_words(verbs[v]->past, lexicon.function_words));
        if (cxn == SortConstruction::ditransitive) {
          recipients[v] = names[next_name++];
          used.merge(content_words(recipients[v], lexicon.function_words));
        }
      }

      std::array<Filler, kDesign> chosen;
      // Depth-first search over verbs in label order with shuffled candidates.
      std::function<bool(int, std::set<std::string>&)> fill = [&](int v, std::set<std::string>& taken) {
        if (v == kDesign) return true;
        const auto& verb = *verbs[v];
        auto objects = verb.objects;
        shuffle(rng, objects);
        std::vector<std::string> extras = {""};
        if (cxn == SortConstruction::caused_motion) extras = verb.goals;
        if (cxn == SortConstruction::resultative) extras = verb.results;
        shuffle(rng, extras);
        for (const auto& object : objects) {
          const auto object_words = content_words(object, lexicon.function_words);
          if (!disjoint(object_words, taken)) continue;
          for (const auto& extra : extras) {
            auto extra_words = content_words(extra, lexicon.function_words);
            if (!disjoint(extra_words, taken) || !disjoint(extra_words, object_words)) continue;
            auto next = taken;
            next.insert(object_words.begin(), object_words.end());
            next.insert(extra_words.begin(), extra_words.end());
            if (fill(v + 1, next)) {
              chosen[v] = {recipients[v], object, extra};
              return true;
            }
          }
        }
        return false;
      };
      if (!fill(0, used)) {
        throw Error(ErrorCategory::generation, "lexicon too small for a non-overlapping '" +
                                                   std::string(kSortConstructionNames[c]) + "' column");
      }
      for (int v = 0; v < kDesign; ++v) texts[v][c] = render(cxn, subjects[v], *verbs[v], chosen[v]);
    }
    for (int v = 0; v < kDesign; ++v) {
      for (int c = 0; c < kDesign; ++c) trial.sentences.push_back({texts[v][c], v, c});
    }
    trials.push_back(std::move(trial));
  }
  return trials;
}

void evaluate_trial(SortingTrial& trial, Linkage linkage) {
  const auto n = static_cast<Eigen::Index>(trial.sentences.size());
  if (trial.embeddings.rows() != n) {
    throw Error(ErrorCategory::shape, "evaluate_trial: expected " + std::to_string(n) + " embeddings");
  }
  trial.cluster_assignment = sort_trial(trial.embeddings, kDesign, linkage);
  std::vector<int> construction_labels, verb_labels;
  for (const auto& s : trial.sentences) {
    construction_labels.push_back(s.construction_label);
    verb_labels.push_back(s.verb_label);
  }
  trial.cdev = sort_deviation(trial.cluster_assignment, construction_labels, kDesign);
  trial.vdev = sort_deviation(trial.cluster_assignment, verb_labels, kDesign);
}

DeviationSummary summarize_deviations(const std::vector<SortingTrial>& trials) {
  if (trials.empty()) throw Error(ErrorCategory::empty, "summarize_deviations: no trials");
  std::vector<double> cdev, vdev;
  for (const auto& t : trials) {
    if (t.cdev < 0 || t.vdev < 0) throw Error(ErrorCategory::validation, "summarize_deviations: unevaluated trial");
    cdev.push_back(t.cdev);
    vdev.push_back(t.vdev);
  }
  DeviationSummary s;
  s.n = static_cast<std::int64_t>(trials.size());
  s.mean_cdev = stats::mean(cdev);
  s.mean_vdev = stats::mean(vdev);
  if (s.n >= 2) {
    const double q = stats::student_t_quantile(0.975, static_cast<double>(s.n - 1));
    const double root_n = std::sqrt(static_cast<double>(s.n));
    s.cdev_half_width = q * stats::sample_sd(cdev) / root_n;
    s.vdev_half_width = q * stats::sample_sd(vdev) / root_n;
  }
  return s;
}

}  // namespace layerlens::cxn
