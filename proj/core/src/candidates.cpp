#include "morphforest/candidates.hpp"

#include <algorithm>
#include <random>

#include "morphforest/io.hpp"
#include "morphforest/utf8.hpp"

namespace morphforest {

namespace {

class CandidateList {
 public:
  explicit CandidateList(std::string child) : child_(std::move(child)) {}

  void add(std::string parent, DerivationType dtype,
           std::vector<AffixId> affix_ids) {
    std::string key = parent;
    key += '\0';
    key += static_cast<char>(dtype);
    if (!seen_.insert(std::move(key)).second) return;
    std::sort(affix_ids.begin(), affix_ids.end());
    out_.push_back({child_, std::move(parent), dtype, std::move(affix_ids), 0.0});
  }

  std::vector<Candidate> take() && { return std::move(out_); }

 private:
  std::string child_;
  StringSet seen_;
  std::vector<Candidate> out_;
};

}  // namespace

std::string_view to_string(DerivationType type) {
  switch (type) {
    case DerivationType::kStop: return "STOP";
    case DerivationType::kSuffix: return "SUFFIX";
    case DerivationType::kPrefix: return "PREFIX";
    case DerivationType::kModify: return "MODIFY";
    case DerivationType::kDelete: return "DELETE";
    case DerivationType::kRepeat: return "REPEAT";
    case DerivationType::kCompoundLeft: return "COMPOUND-LEFT";
    case DerivationType::kCompoundRight: return "COMPOUND-RIGHT";
  }
  return "?";
}

std::optional<DerivationType> parse_derivation_type(std::string_view text) {
  for (auto t : {DerivationType::kStop, DerivationType::kSuffix,
                 DerivationType::kPrefix, DerivationType::kModify,
                 DerivationType::kDelete, DerivationType::kRepeat,
                 DerivationType::kCompoundLeft,
                 DerivationType::kCompoundRight}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

std::vector<Candidate> gen_candidates(std::string_view word,
                                      const Vocabulary& vocab,
                                      const AffixSet& affixes,
                                      const CandidateOptions& options) {
  const std::string child(word);
  CandidateList list(child);
  list.add(child, DerivationType::kStop, {});

  const std::u32string w = utf8::decode(word);
  const std::size_t n = w.size();
  const LanguageProfile& profile = options.profile;

  std::optional<AffixId> repeat_id;
  if (profile.repeat) {
    repeat_id = affixes.find_live(AffixSide::kTransform, repeat_marker());
  }

  for (std::size_t k = 1; k < n; ++k) {
    const auto suffix = affixes.find_live(AffixSide::kSuffix,
                                          utf8::encode(w.substr(n - k)));
    if (!suffix) continue;
    const std::u32string stem = w.substr(0, n - k);

    if (stem.size() >= options.min_stem) {
      list.add(utf8::encode(stem), DerivationType::kSuffix, {*suffix});
    }
    if (repeat_id && stem.size() >= 2 &&
        stem[stem.size() - 1] == stem[stem.size() - 2] &&
        stem.size() - 1 >= options.min_stem) {
      list.add(utf8::encode(stem.substr(0, stem.size() - 1)),
               DerivationType::kRepeat, {*suffix, *repeat_id});
    }
    // The restored parent must stay strictly shorter than the child.
    if (k >= 2 && stem.size() >= options.min_stem) {
      for (char32_t c : profile.delete_chars) {
        const auto marker =
            affixes.find_live(AffixSide::kTransform, delete_marker(c));
        if (!marker) continue;
        list.add(utf8::encode(stem + c), DerivationType::kDelete,
                 {*suffix, *marker});
      }
    }
    if (!stem.empty() && stem.size() >= options.min_stem) {
      for (auto [from, to] : profile.modify) {
        if (stem.back() != from) continue;
        const auto marker =
            affixes.find_live(AffixSide::kTransform, modify_marker(from, to));
        if (!marker) continue;
        std::u32string parent = stem;
        parent.back() = to;
        list.add(utf8::encode(parent), DerivationType::kModify,
                 {*suffix, *marker});
      }
    }
  }

  for (std::size_t k = 1; k < n; ++k) {
    const auto prefix =
        affixes.find_live(AffixSide::kPrefix, utf8::encode(w.substr(0, k)));
    if (!prefix) continue;
    if (n - k >= options.min_stem) {
      list.add(utf8::encode(w.substr(k)), DerivationType::kPrefix, {*prefix});
    }
  }

  if (options.compounds && n >= 2 * options.min_compound_part) {
    for (std::size_t split = options.min_compound_part;
         split + options.min_compound_part <= n; ++split) {
      std::string left = utf8::encode(w.substr(0, split));
      std::string right = utf8::encode(w.substr(split));
      const bool in_left = vocab.contains(left);
      const bool in_right = vocab.contains(right);
      const bool ok = options.compound_requires_both ? (in_left && in_right)
                                                     : (in_left || in_right);
      if (!ok) continue;
      list.add(std::move(left), DerivationType::kCompoundLeft, {});
      list.add(std::move(right), DerivationType::kCompoundRight, {});
    }
  }
  return std::move(list).take();
}

std::optional<std::size_t> surface_boundary(const Candidate& candidate) {
  const std::size_t child = utf8::length(candidate.child);
  const std::size_t parent = utf8::length(candidate.parent);
  switch (candidate.dtype) {
    case DerivationType::kStop: return std::nullopt;
    case DerivationType::kSuffix:
    case DerivationType::kRepeat:
    case DerivationType::kModify:
    case DerivationType::kCompoundLeft: return parent;
    case DerivationType::kDelete: return parent - 1;
    case DerivationType::kPrefix:
    case DerivationType::kCompoundRight: return child - parent;
  }
  return std::nullopt;
}

Neighborhood gen_neighbors(std::string_view word, std::size_t max_neighbors,
                           std::uint64_t seed) {
  Neighborhood out{std::string(word), {std::string(word)}};
  const std::u32string w = utf8::decode(word);
  std::vector<std::string> swaps;
  StringSet seen{std::string(word)};
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i] == w[i + 1]) continue;
    std::u32string s = w;
    std::swap(s[i], s[i + 1]);
    std::string encoded = utf8::encode(s);
    if (seen.insert(encoded).second) swaps.push_back(std::move(encoded));
  }

  if (swaps.size() > max_neighbors) {
    // Partial Fisher-Yates on indices with an explicitly specified engine,
    // then restore position order.
    std::mt19937_64 rng(seed ^ io::fnv1a64(word));
    std::vector<std::size_t> idx(swaps.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < max_neighbors; ++i) {
      const std::size_t span = idx.size() - i;
      const std::size_t j = i + static_cast<std::size_t>(rng() % span);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(max_neighbors);
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> kept;
    kept.reserve(idx.size());
    for (auto i : idx) kept.push_back(std::move(swaps[i]));
    swaps = std::move(kept);
  }
  for (auto& s : swaps) out.neighbors.push_back(std::move(s));
  return out;
}

}  // namespace morphforest
