#include "layerlens/cli/config.hpp"

#include <functional>
#include <map>

#include "json.hpp"
#include "layerlens/cli/report.hpp"
#include "layerlens/error.hpp"

namespace layerlens::cli {

using json = nlohmann::json;

namespace {

Error config_error(const std::string& key, const std::string& why) {
  return Error(ErrorCategory::config, "config key '" + key + "': " + why);
}

template <typename T>
T as(const json& value, const std::string& key);

template <>
bool as<bool>(const json& value, const std::string& key) {
  if (!value.is_boolean()) throw config_error(key, "expected a boolean");
  return value.get<bool>();
}

template <>
double as<double>(const json& value, const std::string& key) {
  if (!value.is_number()) throw config_error(key, "expected a number");
  return value.get<double>();
}

template <>
std::int64_t as<std::int64_t>(const json& value, const std::string& key) {
  if (!value.is_number_integer()) throw config_error(key, "expected an integer");
  return value.get<std::int64_t>();
}

template <>
std::string as<std::string>(const json& value, const std::string& key) {
  if (!value.is_string()) throw config_error(key, "expected a string");
  return value.get<std::string>();
}

template <typename Enum>
Enum as_enum(const json& value, const std::string& key, Enum (*parse)(std::string_view)) {
  const auto text = as<std::string>(value, key);
  try {
    return parse(text);
  } catch (const Error& e) {
    throw config_error(key, e.what());
  }
}

using Setter = std::function<void(const json&, const std::string&)>;

// Applies known keys of one object and records the rest as warnings.
void apply(const json& object, const std::string& prefix, const std::map<std::string, Setter>& setters,
           std::vector<std::string>& warnings) {
  if (!object.is_object()) throw config_error(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (const auto& [key, value] : object.items()) {
    const auto path = prefix.empty() ? key : prefix + "." + key;
    const auto it = setters.find(key);
    if (it == setters.end()) {
      warnings.push_back("unknown config key '" + path + "'");
      continue;
    }
    it->second(value, path);
  }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCategory::config, "malformed config JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  RunConfig c;
  auto& w = c.warnings;

  const std::map<std::string, Setter> tokens = {
      {"include_special", [&](const json& v, const std::string& k) { c.tokens.include_special = as<bool>(v, k); }},
      {"special_tokens",
       [&](const json& v, const std::string& k) {
         if (!v.is_array()) throw config_error(k, "expected an array of strings");
         c.tokens.special_tokens.clear();
         for (const auto& s : v) c.tokens.special_tokens.push_back(as<std::string>(s, k));
       }},
  };
  const std::map<std::string, Setter> lexicon = {
      {"min_total", [&](const json& v, const std::string& k) { c.thresholds.min_total = as<std::int64_t>(v, k); }},
      {"minority_frac", [&](const json& v, const std::string& k) { c.thresholds.minority_frac = as<double>(v, k); }},
      {"inclusion_rate", [&](const json& v, const std::string& k) { c.inclusion_rate = as<double>(v, k); }},
  };
  const std::map<std::string, Setter> semshift = {
      {"min_each", [&](const json& v, const std::string& k) { c.min_each = as<std::int64_t>(v, k); }},
  };
  const std::map<std::string, Setter> gauss_keys = {
      {"covariance",
       [&](const json& v, const std::string& k) { c.covariance = as_enum(v, k, &gauss::parse_kind); }},
      {"ridge", [&](const json& v, const std::string& k) { c.ridge = as<double>(v, k); }},
      {"agg", [&](const json& v, const std::string& k) { c.agg = as_enum(v, k, &gauss::parse_aggregation); }},
      {"train_sentences",
       [&](const json& v, const std::string& k) { c.train_sentences = as<std::int64_t>(v, k); }},
      {"k", [&](const json& v, const std::string& k) { c.gmm_k = static_cast<int>(as<std::int64_t>(v, k)); }},
      {"max_iter",
       [&](const json& v, const std::string& k) { c.max_iter = static_cast<int>(as<std::int64_t>(v, k)); }},
      {"tol", [&](const json& v, const std::string& k) { c.tol = as<double>(v, k); }},
  };
  const std::map<std::string, Setter> sort = {
      {"linkage", [&](const json& v, const std::string& k) { c.linkage = as_enum(v, k, &cxn::parse_linkage); }},
      {"trials", [&](const json& v, const std::string& k) { c.trials = as<std::int64_t>(v, k); }},
  };
  const std::map<std::string, Setter> jabber = {
      {"n_per_construction",
       [&](const json& v, const std::string& k) { c.n_per_construction = as<std::int64_t>(v, k); }},
      {"frequency",
       [&](const json& v, const std::string& k) { c.frequency = as_enum(v, k, &cxn::parse_frequency); }},
  };
  const std::map<std::string, Setter> root = {
      {"seed",
       [&](const json& v, const std::string& k) {
         if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
           throw config_error(k, "expected a nonnegative integer");
         }
         c.seed = v.get<std::uint64_t>();
       }},
      {"layer", [&](const json& v, const std::string& k) { c.layer = as<std::int64_t>(v, k); }},
      {"tokens", [&](const json& v, const std::string& k) { apply(v, k, tokens, w); }},
      {"lexicon", [&](const json& v, const std::string& k) { apply(v, k, lexicon, w); }},
      {"semshift", [&](const json& v, const std::string& k) { apply(v, k, semshift, w); }},
      {"gauss", [&](const json& v, const std::string& k) { apply(v, k, gauss_keys, w); }},
      {"sort", [&](const json& v, const std::string& k) { apply(v, k, sort, w); }},
      {"jabber", [&](const json& v, const std::string& k) { apply(v, k, jabber, w); }},
  };
  apply(doc, "", root, w);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

void RunConfig::validate() const {
  auto require = [](bool ok, const char* key, const char* why) {
    if (!ok) throw config_error(key, why);
  };
  require(!layer || *layer >= 0, "layer", "must be >= 0");
  require(thresholds.min_total > 0, "lexicon.min_total", "must be positive");
  require(thresholds.minority_frac > 0 && thresholds.minority_frac <= 0.5, "lexicon.minority_frac",
          "must be in (0, 0.5]");
  require(inclusion_rate >= 0 && inclusion_rate <= 1, "lexicon.inclusion_rate", "must be in [0, 1]");
  require(min_each >= 1, "semshift.min_each", "must be >= 1");
  require(ridge >= 0, "gauss.ridge", "must be >= 0");
  require(train_sentences >= 1, "gauss.train_sentences", "must be >= 1");
  require(gmm_k >= 1, "gauss.k", "must be >= 1");
  require(max_iter >= 1, "gauss.max_iter", "must be >= 1");
  require(tol > 0, "gauss.tol", "must be positive");
  require(trials >= 1, "sort.trials", "must be >= 1");
  require(n_per_construction >= 1, "jabber.n_per_construction", "must be >= 1");
}

std::string RunConfig::canonical_json() const {
  const json doc = {
      {"seed", seed},
      {"layer", layer ? json(*layer) : json(nullptr)},
      {"tokens", {{"include_special", tokens.include_special}, {"special_tokens", tokens.special_tokens}}},
      {"lexicon",
       {{"min_total", thresholds.min_total},
        {"minority_frac", thresholds.minority_frac},
        {"inclusion_rate", inclusion_rate}}},
      {"semshift", {{"min_each", min_each}}},
      {"gauss",
       {{"covariance", gauss::kind_name(covariance)},
        {"ridge", ridge},
        {"agg", gauss::aggregation_name(agg)},
        {"train_sentences", train_sentences},
        {"k", gmm_k},
        {"max_iter", max_iter},
        {"tol", tol}}},
      {"sort", {{"linkage", cxn::linkage_name(linkage)}, {"trials", trials}}},
      {"jabber", {{"n_per_construction", n_per_construction}, {"frequency", cxn::frequency_name(frequency)}}},
  };
  return doc.dump();
}

std::string RunConfig::hash() const { return sha256_hex(canonical_json()); }

}  // namespace layerlens::cli
