#include "morphforest/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "morphforest/affixes.hpp"
#include "morphforest/error.hpp"
#include "morphforest/io.hpp"
#include "morphforest/strings.hpp"
#include "morphforest/utf8.hpp"

namespace morphforest {

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorKind::kValidation, "grammar spec: " + message);
}

bool is_rate(double r) { return std::isfinite(r) && r >= 0.0 && r <= 1.0; }

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ',';
    out += items[i];
  }
  return out;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  for (auto item : io::split(text, ',')) {
    item = io::trim(item);
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(engine_() % n);
  }
  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

bool starts_with(const std::u32string& s, const std::u32string& p) {
  return s.size() >= p.size() && s.compare(0, p.size(), p) == 0;
}

bool ends_with(const std::u32string& s, const std::u32string& p) {
  return s.size() >= p.size() && s.compare(s.size() - p.size(), p.size(), p) == 0;
}

bool is_vowel(char32_t c) {
  return c == U'a' || c == U'e' || c == U'i' || c == U'o' || c == U'u';
}

struct Root {
  std::u32string base;       // surface stem before a transform
  std::u32string canonical;  // base + 'e' for delete roots
  bool drops_e = false;
  bool doubles = false;
};

// Affix index stacks with no immediate repetition.
std::vector<std::vector<std::size_t>> stacks(std::size_t inventory,
                                             std::size_t max_depth) {
  std::vector<std::vector<std::size_t>> out{{}};
  std::vector<std::vector<std::size_t>> frontier{{}};
  for (std::size_t d = 0; d < max_depth && inventory > 0; ++d) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& s : frontier) {
      for (std::size_t a = 0; a < inventory; ++a) {
        if (!s.empty() && s.back() == a) continue;
        auto t = s;
        t.push_back(a);
        next.push_back(t);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

void validate(const GrammarSpec& spec) {
  if (spec.roots == 0) invalid("roots must be positive");
  if (spec.root_min_length < 2 || spec.root_min_length > spec.root_max_length) {
    invalid("need 2 <= root_min_length <= root_max_length");
  }
  if (utf8::decode(spec.alphabet).size() < 2) {
    invalid("alphabet needs at least two letters");
  }
  if (!is_rate(spec.delete_rate) || !is_rate(spec.repeat_rate) ||
      !is_rate(spec.compound_rate)) {
    invalid("rates must lie in [0, 1]");
  }
  if (!std::isfinite(spec.zipf_exponent) || spec.zipf_exponent < 0.0) {
    invalid("zipf_exponent must be nonnegative");
  }
  if (spec.max_count == 0) invalid("max_count must be positive");
  if (spec.words < spec.roots) invalid("words must be at least roots");
  StringSet affixes;
  for (const auto* list : {&spec.suffixes, &spec.prefixes}) {
    for (const auto& a : *list) {
      if (a.empty()) invalid("empty affix");
      if (!affixes.insert(a).second) invalid("duplicate affix '" + a + "'");
    }
  }
  if (spec.explicit_decoys.size() > spec.decoys) {
    invalid("more explicit decoys than decoys");
  }
  StringSet decoys;
  for (const auto& d : spec.explicit_decoys) {
    if (d.empty()) invalid("empty decoy");
    if (affixes.contains(d)) invalid("decoy '" + d + "' is a true affix");
    if (!decoys.insert(d).second) invalid("duplicate decoy '" + d + "'");
  }
}

std::string serialize_spec(const GrammarSpec& s) {
  std::string out;
  auto put = [&out](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  put("alphabet", s.alphabet);
  put("compound_rate", io::format_double(s.compound_rate));
  put("decoys", std::to_string(s.decoys));
  put("delete_rate", io::format_double(s.delete_rate));
  put("explicit_decoys", join(s.explicit_decoys));
  put("max_count", std::to_string(s.max_count));
  put("max_prefixes", std::to_string(s.max_prefixes));
  put("max_suffixes", std::to_string(s.max_suffixes));
  put("prefixes", join(s.prefixes));
  put("repeat_rate", io::format_double(s.repeat_rate));
  put("root_max_length", std::to_string(s.root_max_length));
  put("root_min_length", std::to_string(s.root_min_length));
  put("roots", std::to_string(s.roots));
  put("seed", std::to_string(s.seed));
  put("suffixes", join(s.suffixes));
  put("words", std::to_string(s.words));
  put("zipf_exponent", io::format_double(s.zipf_exponent));
  return out;
}

GrammarSpec parse_spec(std::string_view text, std::string_view source) {
  GrammarSpec s;
  const std::string src(source);
  for (const auto& kv : io::parse_key_values(text, source)) {
    auto fail = [&](const std::string& why) -> void {
      throw ParseError(src, kv.line, why);
    };
    auto as_size = [&]() -> std::uint64_t {
      std::size_t used = 0;
      std::uint64_t v = 0;
      try {
        if (kv.value.empty() || kv.value[0] == '-') throw std::invalid_argument("");
        v = std::stoull(kv.value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != kv.value.size()) {
        fail("bad integer for '" + kv.key + "': '" + kv.value + "'");
      }
      return v;
    };
    auto as_double = [&]() -> double {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(kv.value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != kv.value.size()) {
        fail("bad number for '" + kv.key + "': '" + kv.value + "'");
      }
      return v;
    };
    const auto& k = kv.key;
    if (k == "roots") s.roots = as_size();
    else if (k == "root_min_length") s.root_min_length = as_size();
    else if (k == "root_max_length") s.root_max_length = as_size();
    else if (k == "alphabet") s.alphabet = kv.value;
    else if (k == "suffixes") s.suffixes = split_list(kv.value);
    else if (k == "prefixes") s.prefixes = split_list(kv.value);
    else if (k == "max_suffixes") s.max_suffixes = as_size();
    else if (k == "max_prefixes") s.max_prefixes = as_size();
    else if (k == "decoys") s.decoys = as_size();
    else if (k == "explicit_decoys") s.explicit_decoys = split_list(kv.value);
    else if (k == "delete_rate") s.delete_rate = as_double();
    else if (k == "repeat_rate") s.repeat_rate = as_double();
    else if (k == "compound_rate") s.compound_rate = as_double();
    else if (k == "zipf_exponent") s.zipf_exponent = as_double();
    else if (k == "max_count") s.max_count = as_size();
    else if (k == "words") s.words = as_size();
    else if (k == "seed") s.seed = as_size();
    else fail("unknown key '" + k + "'");
  }
  validate(s);
  return s;
}

SynthCorpus generate(const GrammarSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const std::u32string alphabet = utf8::decode(spec.alphabet);
  std::vector<std::u32string> suffixes, prefixes;
  for (const auto& s : spec.suffixes) suffixes.push_back(utf8::decode(s));
  for (const auto& p : spec.prefixes) prefixes.push_back(utf8::decode(p));

  // Roots: prefix-free (and suffix-free when prefixes exist), not ending in
  // a true suffix, not starting with a true prefix.
  auto clean = [&](const std::u32string& r) {
    for (const auto& s : suffixes) {
      if (ends_with(r, s)) return false;
    }
    for (const auto& p : prefixes) {
      if (starts_with(r, p)) return false;
    }
    return true;
  };
  std::vector<Root> roots;
  std::size_t attempts = 0;
  while (roots.size() < spec.roots) {
    if (++attempts > 200000) invalid("could not sample enough distinct roots");
    const std::size_t len = spec.root_min_length +
        rng.below(spec.root_max_length - spec.root_min_length + 1);
    Root r;
    for (std::size_t i = 0; i < len; ++i) {
      r.base += alphabet[rng.below(alphabet.size())];
    }
    r.drops_e = rng.unit() < spec.delete_rate && r.base.back() != U'e';
    r.doubles = !r.drops_e && rng.unit() < spec.repeat_rate &&
                !is_vowel(r.base.back());
    r.canonical = r.drops_e ? r.base + U'e' : r.base;
    if (!clean(r.base) || !clean(r.canonical)) continue;
    bool ok = true;
    for (const auto& o : roots) {
      for (const auto* a : {&r.base, &r.canonical}) {
        for (const auto* b : {&o.base, &o.canonical}) {
          if (starts_with(*a, *b) || starts_with(*b, *a)) ok = false;
          if (!prefixes.empty() && (ends_with(*a, *b) || ends_with(*b, *a))) {
            ok = false;
          }
        }
      }
    }
    if (ok) roots.push_back(std::move(r));
  }

  const auto suffix_stacks = stacks(suffixes.size(), spec.max_suffixes);
  const auto prefix_stacks = stacks(prefixes.size(), spec.max_prefixes);

  struct Form {
    std::size_t root;
    std::vector<std::size_t> pre;  // outermost first
    std::vector<std::size_t> suf;  // innermost first
  };
  auto build = [&](const Form& f) {
    const Root& r = roots[f.root];
    SynthWord w;
    for (auto p : f.pre) w.morphs.push_back(utf8::encode(prefixes[p]));
    if (f.suf.empty()) {
      w.morphs.push_back(utf8::encode(r.canonical));
    } else {
      const auto& first = suffixes[f.suf[0]];
      if (r.drops_e && first.size() >= 2) {
        w.morphs.push_back(utf8::encode(r.base));
        w.morphs.push_back(utf8::encode(first));
      } else if (r.doubles) {
        w.morphs.push_back(utf8::encode(r.base));
        w.morphs.push_back(utf8::encode(std::u32string(1, r.base.back()) + first));
      } else {
        w.morphs.push_back(utf8::encode(r.canonical));
        w.morphs.push_back(utf8::encode(first));
      }
      for (std::size_t i = 1; i < f.suf.size(); ++i) {
        w.morphs.push_back(utf8::encode(suffixes[f.suf[i]]));
      }
    }
    for (const auto& m : w.morphs) w.word += m;
    w.root = utf8::encode(r.canonical);
    return w;
  };

  std::vector<SynthWord> words;
  StringSet seen;
  auto add = [&](SynthWord w) {
    if (seen.insert(w.word).second) words.push_back(std::move(w));
  };

  const std::size_t compounds = roots.size() < 2
      ? 0
      : static_cast<std::size_t>(std::llround(spec.compound_rate *
                                              static_cast<double>(spec.words)));
  const std::size_t derived_budget =
      spec.words > compounds ? spec.words - compounds : roots.size();

  for (std::size_t r = 0; r < roots.size(); ++r) add(build({r, {}, {}}));

  std::vector<Form> forms;
  for (std::size_t r = 0; r < roots.size(); ++r) {
    for (const auto& pre : prefix_stacks) {
      for (const auto& suf : suffix_stacks) {
        if (pre.empty() && suf.empty()) continue;
        forms.push_back({r, pre, suf});
      }
    }
  }
  rng.shuffle(forms);
  // Each sampled form brings its intermediate derivations along so every
  // parent of a generated word is itself generated.
  for (const auto& f : forms) {
    if (words.size() >= derived_budget) break;
    std::vector<SynthWord> closure;
    for (std::size_t a = 0; a <= f.pre.size(); ++a) {
      for (std::size_t b = 0; b <= f.suf.size(); ++b) {
        Form g{f.root,
               std::vector<std::size_t>(f.pre.end() - static_cast<std::ptrdiff_t>(a),
                                        f.pre.end()),
               std::vector<std::size_t>(f.suf.begin(),
                                        f.suf.begin() + static_cast<std::ptrdiff_t>(b))};
        SynthWord w = build(g);
        if (!seen.contains(w.word)) closure.push_back(std::move(w));
      }
    }
    std::sort(closure.begin(), closure.end(),
              [](const SynthWord& x, const SynthWord& y) { return x.word < y.word; });
    closure.erase(std::unique(closure.begin(), closure.end(),
                              [](const SynthWord& x, const SynthWord& y) {
                                return x.word == y.word;
                              }),
                  closure.end());
    if (words.size() + closure.size() > derived_budget) continue;
    for (auto& w : closure) add(std::move(w));
  }

  for (std::size_t c = 0, tries = 0; c < compounds && tries < 100 * compounds + 100;
       ++tries) {
    const auto a = rng.below(roots.size());
    const auto b = rng.below(roots.size());
    if (a == b) continue;
    SynthWord w;
    w.morphs = {utf8::encode(roots[a].canonical), utf8::encode(roots[b].canonical)};
    w.word = w.morphs[0] + w.morphs[1];
    w.root = w.morphs[1];
    if (seen.contains(w.word)) continue;
    add(std::move(w));
    ++c;
  }

  // Zipfian counts over a random rank order.
  std::vector<std::size_t> rank(words.size());
  for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
  rng.shuffle(rank);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double c = static_cast<double>(spec.max_count) /
                     std::pow(static_cast<double>(rank[i] + 1), spec.zipf_exponent);
    words[i].count = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(c)));
  }
  std::sort(words.begin(), words.end(), [](const SynthWord& a, const SynthWord& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.word < b.word;
  });

  // Strings on either side of a gold boundary; decoys must avoid them.
  StringSet at_boundary;
  for (const auto& w : words) {
    std::string left, right = w.word;
    for (std::size_t i = 0; i + 1 < w.morphs.size(); ++i) {
      left += w.morphs[i];
      right = right.substr(w.morphs[i].size());
      at_boundary.insert(left);
      at_boundary.insert(right);
    }
  }
  StringSet taken(spec.suffixes.begin(), spec.suffixes.end());
  taken.insert(spec.prefixes.begin(), spec.prefixes.end());

  SynthCorpus out;
  for (const auto& d : spec.explicit_decoys) {
    if (at_boundary.contains(d)) {
      invalid("explicit decoy '" + d + "' occurs at a gold boundary");
    }
    out.decoys.push_back(d);
    taken.insert(d);
  }
  const bool prefix_decoys = suffixes.empty() && !prefixes.empty();
  out.prefix_decoys = prefix_decoys;
  std::vector<std::size_t> order(roots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t len = 2; len <= 3 && out.decoys.size() < spec.decoys; ++len) {
    for (auto r : order) {
      if (out.decoys.size() >= spec.decoys) break;
      const auto& c = roots[r].canonical;
      if (c.size() <= len) continue;
      const std::string d = utf8::encode(prefix_decoys ? c.substr(0, len)
                                                       : c.substr(c.size() - len));
      if (taken.contains(d) || at_boundary.contains(d)) continue;
      out.decoys.push_back(d);
      taken.insert(d);
    }
  }
  if (out.decoys.size() < spec.decoys) invalid("could not find enough decoys");

  for (const auto& r : roots) out.roots.push_back(utf8::encode(r.canonical));
  out.words = std::move(words);
  return out;
}

Vocabulary SynthCorpus::vocabulary() const {
  std::vector<WordCount> counts;
  counts.reserve(words.size());
  for (const auto& w : words) counts.push_back({w.word, w.count});
  const std::size_t n = counts.size();
  return Vocabulary::from_counts(std::move(counts), std::max<std::size_t>(1, n));
}

std::string SynthCorpus::wordlist_tsv() const {
  std::string out;
  for (const auto& w : words) out += w.word + '\t' + std::to_string(w.count) + '\n';
  return out;
}

std::string SynthCorpus::gold_segmentations_tsv() const {
  std::string out;
  for (const auto& w : words) {
    out += w.word + '\t';
    for (std::size_t i = 0; i < w.morphs.size(); ++i) {
      if (i > 0) out += ' ';
      out += w.morphs[i];
    }
    out += '\n';
  }
  return out;
}

std::string SynthCorpus::gold_clusters_tsv() const {
  std::string out;
  for (const auto& w : words) out += w.word + '\t' + w.root + '\n';
  return out;
}

std::string SynthCorpus::gold_roots_tsv() const { return gold_clusters_tsv(); }

std::string SynthCorpus::decoys_tsv() const {
  AffixSet set;
  const auto side = prefix_decoys ? AffixSide::kPrefix : AffixSide::kSuffix;
  for (const auto& d : decoys) set.add(side, d, 1);
  return serialize_affixes(set);
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  io::write_file(dir / "words.tsv", corpus.wordlist_tsv());
  io::write_file(dir / "gold_seg.tsv", corpus.gold_segmentations_tsv());
  io::write_file(dir / "gold_clusters.tsv", corpus.gold_clusters_tsv());
  io::write_file(dir / "gold_roots.tsv", corpus.gold_roots_tsv());
  io::write_file(dir / "decoys.tsv", corpus.decoys_tsv());
}

}  // namespace morphforest
