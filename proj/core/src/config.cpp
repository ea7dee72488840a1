#include "morphforest/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include "morphforest/error.hpp"
#include "morphforest/io.hpp"
#include "morphforest/utf8.hpp"

#ifndef MORPHFOREST_VERSION
#define MORPHFOREST_VERSION "0.0.0"
#endif

namespace morphforest {

namespace {

[[noreturn]] void usage(const std::string& message) {
  throw Error(ErrorKind::kUsage, message);
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  usage("config: '" + std::string(key) + "' expects a boolean, got '" +
        std::string(v) + "'");
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    usage("config: '" + std::string(key) + "' expects a finite number, got '" +
          std::string(v) + "'");
  }
  return out;
}

std::uint64_t parse_count(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    usage("config: '" + std::string(key) +
          "' expects a nonnegative integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::string render_modify(const LanguageProfile& p) {
  std::string out;
  for (std::size_t i = 0; i < p.modify.size(); ++i) {
    if (i > 0) out += ',';
    out += utf8::encode(p.modify[i].first) + ">" + utf8::encode(p.modify[i].second);
  }
  return out;
}

std::vector<std::pair<char32_t, char32_t>> parse_modify(std::string_view v) {
  std::vector<std::pair<char32_t, char32_t>> out;
  for (auto item : io::split(v, ',')) {
    item = io::trim(item);
    if (item.empty()) continue;
    const auto arrow = item.find('>');
    const auto from = utf8::decode(item.substr(0, arrow == std::string_view::npos ? 0 : arrow));
    const auto to = arrow == std::string_view::npos
                        ? std::u32string()
                        : utf8::decode(item.substr(arrow + 1));
    if (from.size() != 1 || to.size() != 1) {
      usage("config: 'modify' expects pairs like 'i>y', got '" +
            std::string(item) + "'");
    }
    out.emplace_back(from[0], to[0]);
  }
  return out;
}

struct Key {
  std::function<void(RunConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Field>
Key real_key(Field field) {
  return {[field](RunConfig& c, std::string_view k, std::string_view v) {
            field(c) = parse_real(k, v);
          },
          [field](const RunConfig& c) {
            return io::format_double(field(const_cast<RunConfig&>(c)));
          }};
}

template <class Field>
Key count_key(Field field) {
  return {[field](RunConfig& c, std::string_view k, std::string_view v) {
            using T = std::remove_reference_t<decltype(field(c))>;
            field(c) = static_cast<T>(parse_count(k, v));
          },
          [field](const RunConfig& c) {
            return std::to_string(field(const_cast<RunConfig&>(c)));
          }};
}

template <class Field>
Key bool_key(Field field) {
  return {[field](RunConfig& c, std::string_view k, std::string_view v) {
            field(c) = parse_bool(k, v);
          },
          [field](const RunConfig& c) {
            return std::string(field(const_cast<RunConfig&>(c)) ? "true" : "false");
          }};
}

const std::map<std::string, Key, std::less<>>& keys() {
  static const std::map<std::string, Key, std::less<>> table = [] {
    std::map<std::string, Key, std::less<>> t;
    t["alpha"] = real_key([](RunConfig& c) -> double& { return c.train.alpha; });
    t["beta"] = real_key([](RunConfig& c) -> double& { return c.train.beta; });
    t["allow_negative_beta"] = bool_key(
        [](RunConfig& c) -> bool& { return c.train.allow_negative_beta; });
    t["top_k"] = count_key([](RunConfig& c) -> std::size_t& { return c.top_k; });
    t["affixes_per_side"] = count_key(
        [](RunConfig& c) -> std::size_t& { return c.train.extraction.max_per_side; });
    t["affix_budget"] = {
        [](RunConfig& c, std::string_view k, std::string_view v) {
          using B = ExtractionOptions::Budget;
          if (v == "per_side") c.train.extraction.budget = B::kPerSide;
          else if (v == "total") c.train.extraction.budget = B::kTotal;
          else usage("config: '" + std::string(k) + "' expects per_side or total");
        },
        [](const RunConfig& c) {
          return std::string(c.train.extraction.budget ==
                                     ExtractionOptions::Budget::kTotal
                                 ? "total"
                                 : "per_side");
        }};
    t["min_affix_support"] = count_key(
        [](RunConfig& c) -> std::uint64_t& { return c.train.extraction.min_support; });
    t["min_parent_length"] = count_key([](RunConfig& c) -> std::size_t& {
      return c.train.extraction.min_parent_length;
    });
    t["max_affix_length"] = count_key([](RunConfig& c) -> std::size_t& {
      return c.train.extraction.max_affix_length;
    });
    t["rounds"] = count_key([](RunConfig& c) -> std::size_t& { return c.train.rounds; });
    t["adam_lr"] = real_key([](RunConfig& c) -> double& { return c.train.adam.lr; });
    t["adam_iters"] = count_key(
        [](RunConfig& c) -> std::size_t& { return c.train.adam.iters; });
    t["adam_beta1"] = real_key([](RunConfig& c) -> double& { return c.train.adam.beta1; });
    t["adam_beta2"] = real_key([](RunConfig& c) -> double& { return c.train.adam.beta2; });
    t["adam_eps"] = real_key([](RunConfig& c) -> double& { return c.train.adam.eps; });
    t["l2"] = real_key([](RunConfig& c) -> double& { return c.train.adam.l2; });
    t["warm_start"] = bool_key([](RunConfig& c) -> bool& { return c.train.warm_start; });
    t["sibl"] = bool_key([](RunConfig& c) -> bool& { return c.train.features.siblings; });
    t["comp"] = {
        [](RunConfig& c, std::string_view k, std::string_view v) {
          c.train.features.compounds = c.train.candidates.compounds = parse_bool(k, v);
        },
        [](const RunConfig& c) {
          return std::string(c.train.candidates.compounds ? "true" : "false");
        }};
    t["compound_requires_both"] = bool_key([](RunConfig& c) -> bool& {
      return c.train.candidates.compound_requires_both;
    });
    t["min_stem"] = count_key(
        [](RunConfig& c) -> std::size_t& { return c.train.candidates.min_stem; });
    t["min_compound_part"] = count_key([](RunConfig& c) -> std::size_t& {
      return c.train.candidates.min_compound_part;
    });
    t["ilp_mode"] = {
        [](RunConfig& c, std::string_view k, std::string_view v) {
          if (v == "exact") c.train.ilp.mode = IlpMode::kExact;
          else if (v == "greedy") c.train.ilp.mode = IlpMode::kGreedy;
          else if (v == "off") c.train.ilp.mode = IlpMode::kOff;
          else usage("config: '" + std::string(k) + "' expects exact, greedy or off");
        },
        [](const RunConfig& c) { return std::string(to_string(c.train.ilp.mode)); }};
    t["exact_limit"] = count_key(
        [](RunConfig& c) -> std::size_t& { return c.train.ilp.exact_limit; });
    t["node_budget"] = count_key(
        [](RunConfig& c) -> std::uint64_t& { return c.train.ilp.node_budget; });
    t["seed"] = count_key([](RunConfig& c) -> std::uint64_t& { return c.train.seed; });
    t["max_neighbors"] = count_key(
        [](RunConfig& c) -> std::size_t& { return c.train.max_neighbors; });
    t["lowercase"] = bool_key([](RunConfig& c) -> bool& { return c.corpus.lowercase; });
    t["filter_nonalpha"] = bool_key(
        [](RunConfig& c) -> bool& { return c.corpus.filter_nonalpha; });
    t["language"] = {
        [](RunConfig& c, std::string_view k, std::string_view v) {
          const auto profile = LanguageProfile::named(v);
          if (!profile) {
            usage("config: '" + std::string(k) +
                  "' expects english, german or none, got '" + std::string(v) + "'");
          }
          c.language = std::string(v);
          c.train.candidates.profile = *profile;
        },
        [](const RunConfig& c) { return c.language; }};
    t["delete_chars"] = {
        [](RunConfig& c, std::string_view, std::string_view v) {
          c.train.candidates.profile.delete_chars = utf8::decode(v);
        },
        [](const RunConfig& c) {
          return utf8::encode(c.train.candidates.profile.delete_chars);
        }};
    t["modify"] = {
        [](RunConfig& c, std::string_view, std::string_view v) {
          c.train.candidates.profile.modify = parse_modify(v);
        },
        [](const RunConfig& c) { return render_modify(c.train.candidates.profile); }};
    t["repeat"] = bool_key(
        [](RunConfig& c) -> bool& { return c.train.candidates.profile.repeat; });
    t["freq_bin_width"] = real_key(
        [](RunConfig& c) -> double& { return c.train.features.freq_bin_width; });
    t["freq_bin_cap"] = {
        [](RunConfig& c, std::string_view k, std::string_view v) {
          c.train.features.freq_bin_cap = static_cast<int>(parse_count(k, v));
        },
        [](const RunConfig& c) { return std::to_string(c.train.features.freq_bin_cap); }};
    t["vector_retention"] = {
        [](RunConfig& c, std::string_view k, std::string_view v) {
          if (v == "all") c.vector_retention = VectorRetention::kAll;
          else if (v == "vocabulary") c.vector_retention = VectorRetention::kVocabulary;
          else usage("config: '" + std::string(k) + "' expects all or vocabulary");
        },
        [](const RunConfig& c) {
          return std::string(c.vector_retention == VectorRetention::kAll ? "all"
                                                                         : "vocabulary");
        }};
    return t;
  }();
  return table;
}

}  // namespace

void set_config_value(RunConfig& config, std::string_view key,
                      std::string_view value) {
  const auto it = keys().find(key);
  if (it == keys().end()) usage("config: unknown key '" + std::string(key) + "'");
  it->second.set(config, key, io::trim(value));
}

RunConfig parse_config(std::string_view text, RunConfig base,
                       std::string_view source) {
  const auto entries = io::parse_key_values(text, source);
  auto apply = [&](const io::KeyValue& kv) {
    try {
      set_config_value(base, kv.key, kv.value);
    } catch (const Error& e) {
      throw ParseError(std::string(source), kv.line, e.what());
    }
  };
  for (const auto& kv : entries) {
    if (kv.key == "language") apply(kv);
  }
  for (const auto& kv : entries) {
    if (kv.key != "language") apply(kv);
  }
  return base;
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& [name, key] : keys()) {
    out += name;
    out += " = ";
    out += key.get(config);
    out += '\n';
  }
  return out;
}

void validate(const RunConfig& c) {
  const auto& t = c.train;
  auto check = [](bool ok, const char* message) {
    if (!ok) throw Error(ErrorKind::kValidation, std::string("config: ") + message);
  };
  check(t.alpha >= 0.0, "alpha must be nonnegative");
  check(c.top_k >= 1, "top_k must be positive");
  check(t.rounds >= 1, "rounds must be positive");
  check(t.adam.iters >= 1, "adam_iters must be positive");
  check(t.adam.lr > 0.0, "adam_lr must be positive");
  check(t.adam.beta1 >= 0.0 && t.adam.beta1 < 1.0, "adam_beta1 must lie in [0, 1)");
  check(t.adam.beta2 >= 0.0 && t.adam.beta2 < 1.0, "adam_beta2 must lie in [0, 1)");
  check(t.adam.eps > 0.0, "adam_eps must be positive");
  check(t.adam.l2 >= 0.0, "l2 must be nonnegative");
  check(t.extraction.max_per_side >= 1, "affixes_per_side must be positive");
  check(t.extraction.max_affix_length >= 1, "max_affix_length must be positive");
  check(t.candidates.min_stem >= 1, "min_stem must be positive");
  check(t.candidates.min_compound_part >= 1, "min_compound_part must be positive");
  check(t.features.freq_bin_width > 0.0, "freq_bin_width must be positive");
  check(t.ilp.node_budget >= 1, "node_budget must be positive");
}

std::uint64_t config_hash(const RunConfig& config) {
  return io::fnv1a64(serialize_config(config));
}

std::string_view version() { return MORPHFOREST_VERSION; }

}  // namespace morphforest
