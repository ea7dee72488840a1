#include "morphforest/affixes.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "morphforest/error.hpp"
#include "morphforest/io.hpp"
#include "morphforest/utf8.hpp"

namespace morphforest {

namespace {

std::string key_of(AffixSide side, std::string_view text) {
  std::string key(1, static_cast<char>('0' + static_cast<int>(side)));
  key += ':';
  key += text;
  return key;
}

std::string_view label_prefix(AffixSide side) {
  switch (side) {
    case AffixSide::kSuffix: return "suf:";
    case AffixSide::kPrefix: return "pre:";
    case AffixSide::kTransform: return "tr:";
  }
  return "";
}

struct Residue {
  std::string text;
  std::uint64_t support;
  AffixSide side;
};

void rank_residues(std::vector<Residue>& residues) {
  std::sort(residues.begin(), residues.end(),
            [](const Residue& a, const Residue& b) {
              if (a.support != b.support) return a.support > b.support;
              if (a.side != b.side) return a.side < b.side;
              return a.text < b.text;
            });
}

}  // namespace

std::string_view to_string(AffixSide side) {
  switch (side) {
    case AffixSide::kSuffix: return "suffix";
    case AffixSide::kPrefix: return "prefix";
    case AffixSide::kTransform: return "transform";
  }
  return "?";
}

std::optional<AffixSide> parse_affix_side(std::string_view text) {
  if (text == "suffix") return AffixSide::kSuffix;
  if (text == "prefix") return AffixSide::kPrefix;
  if (text == "transform") return AffixSide::kTransform;
  return std::nullopt;
}

LanguageProfile LanguageProfile::english() {
  LanguageProfile p;
  p.repeat = true;
  p.delete_chars = U"e";
  p.modify = {{U'i', U'y'}};
  return p;
}

LanguageProfile LanguageProfile::german() {
  LanguageProfile p;
  p.delete_chars = U"e";
  return p;
}

std::optional<LanguageProfile> LanguageProfile::named(std::string_view name) {
  if (name == "english") return english();
  if (name == "german") return german();
  if (name == "none") return none();
  return std::nullopt;
}

std::string repeat_marker() { return "rep"; }

std::string delete_marker(char32_t c) { return "del:" + utf8::encode(c); }

std::string modify_marker(char32_t from, char32_t to) {
  return "mod:" + utf8::encode(from) + ">" + utf8::encode(to);
}

AffixId AffixSet::add(AffixSide side, std::string text, std::uint64_t support,
                      bool live) {
  if (text.empty()) throw_contract("affix text must be non-empty");
  auto key = key_of(side, text);
  if (by_key_.contains(key)) {
    throw_contract("duplicate affix " + std::string(label_prefix(side)) +
                   text);
  }
  const AffixId id{static_cast<std::uint32_t>(affixes_.size())};
  affixes_.push_back({id, side, std::move(text), support, live});
  by_key_.emplace(std::move(key), id);
  return id;
}

std::optional<AffixId> AffixSet::find(AffixSide side,
                                      std::string_view text) const {
  auto it = by_key_.find(key_of(side, text));
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

std::optional<AffixId> AffixSet::find_live(AffixSide side,
                                           std::string_view text) const {
  auto id = find(side, text);
  if (id && affixes_[id->value].live) return id;
  return std::nullopt;
}

std::vector<AffixId> AffixSet::live_ids() const {
  std::vector<AffixId> ids;
  for (const auto& a : affixes_) {
    if (a.live) ids.push_back(a.id);
  }
  return ids;
}

std::size_t AffixSet::live_count() const {
  return static_cast<std::size_t>(
      std::count_if(affixes_.begin(), affixes_.end(),
                    [](const Affix& a) { return a.live; }));
}

std::size_t AffixSet::live_count(AffixSide side) const {
  return static_cast<std::size_t>(
      std::count_if(affixes_.begin(), affixes_.end(), [side](const Affix& a) {
        return a.live && a.side == side;
      }));
}

std::string AffixSet::label(AffixId id) const {
  const auto& a = at(id);
  return std::string(label_prefix(a.side)) + a.text;
}

std::optional<AffixId> AffixSet::find_label(std::string_view label) const {
  for (auto side :
       {AffixSide::kSuffix, AffixSide::kPrefix, AffixSide::kTransform}) {
    const auto prefix = label_prefix(side);
    if (label.starts_with(prefix)) {
      return find(side, label.substr(prefix.size()));
    }
  }
  return std::nullopt;
}

std::size_t AffixSet::max_live_length(AffixSide side) const {
  std::size_t best = 0;
  for (const auto& a : affixes_) {
    if (a.live && a.side == side) {
      best = std::max(best, utf8::length(a.text));
    }
  }
  return best;
}

void AffixSet::register_transforms(const LanguageProfile& profile) {
  auto ensure = [this](const std::string& name) {
    if (!find(AffixSide::kTransform, name)) {
      add(AffixSide::kTransform, name, 0);
    }
  };
  if (profile.repeat) ensure(repeat_marker());
  for (char32_t c : profile.delete_chars) ensure(delete_marker(c));
  for (auto [from, to] : profile.modify) ensure(modify_marker(from, to));
}

AffixSet extract_affixes(const Vocabulary& vocab,
                         const ExtractionOptions& options) {
  std::map<std::string, std::uint64_t> suffix_counts;
  std::map<std::string, std::uint64_t> prefix_counts;

  for (const auto& entry : vocab.entries()) {
    const std::u32string w = utf8::decode(entry.word);
    const std::size_t n = w.size();
    for (std::size_t split = options.min_parent_length; split < n; ++split) {
      const std::size_t affix_len = n - split;
      if (affix_len > options.max_affix_length) continue;
      // suffix: w = parent + residue
      if (vocab.contains(utf8::encode(w.substr(0, split)))) {
        ++suffix_counts[utf8::encode(w.substr(split))];
      }
    }
    for (std::size_t affix_len = 1;
         affix_len <= options.max_affix_length && affix_len < n; ++affix_len) {
      if (n - affix_len < options.min_parent_length) break;
      // prefix: w = residue + parent
      if (vocab.contains(utf8::encode(w.substr(affix_len)))) {
        ++prefix_counts[utf8::encode(w.substr(0, affix_len))];
      }
    }
  }

  auto collect = [&](const std::map<std::string, std::uint64_t>& counts,
                     AffixSide side) {
    std::vector<Residue> out;
    for (const auto& [text, support] : counts) {
      if (support >= options.min_support) out.push_back({text, support, side});
    }
    rank_residues(out);
    return out;
  };
  std::vector<Residue> suffixes = collect(suffix_counts, AffixSide::kSuffix);
  std::vector<Residue> prefixes = collect(prefix_counts, AffixSide::kPrefix);

  if (options.budget == ExtractionOptions::Budget::kPerSide) {
    if (suffixes.size() > options.max_per_side) {
      suffixes.resize(options.max_per_side);
    }
    if (prefixes.size() > options.max_per_side) {
      prefixes.resize(options.max_per_side);
    }
  } else {
    std::vector<Residue> both = suffixes;
    both.insert(both.end(), prefixes.begin(), prefixes.end());
    rank_residues(both);
    if (both.size() > options.max_per_side) both.resize(options.max_per_side);
    suffixes.clear();
    prefixes.clear();
    for (auto& r : both) {
      (r.side == AffixSide::kSuffix ? suffixes : prefixes).push_back(r);
    }
  }

  AffixSet set;
  for (const auto& r : suffixes) set.add(AffixSide::kSuffix, r.text, r.support);
  for (const auto& r : prefixes) set.add(AffixSide::kPrefix, r.text, r.support);
  return set;
}

AffixSet prune(const AffixSet& affixes, std::span<const AffixId> kept) {
  std::vector<bool> keep(affixes.size(), false);
  for (AffixId id : kept) {
    if (id.value >= affixes.size()) {
      throw_contract("prune: unknown affix id " + std::to_string(id.value));
    }
    if (!affixes.is_live(id)) {
      throw_contract("prune: cannot revive dead affix " + affixes.label(id));
    }
    keep[id.value] = true;
  }
  AffixSet out = affixes;
  for (auto& a : out.affixes_) a.live = keep[a.id.value];
  return out;
}

std::string serialize_affixes(const AffixSet& affixes) {
  std::string out;
  for (const auto& a : affixes.all()) {
    out += to_string(a.side);
    out += '\t';
    out += a.text;
    out += '\t';
    out += std::to_string(a.support);
    out += '\t';
    out += a.live ? '1' : '0';
    out += '\n';
  }
  return out;
}

AffixSet parse_affixes(std::string_view text, std::string_view source) {
  const std::string src(source);
  AffixSet set;
  const auto all = io::lines(text);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto line = all[i];
    if (io::trim(line).empty() || line.front() == '#') continue;
    const auto cols = io::split(line, '\t');
    if (cols.size() != 4) {
      throw ParseError(src, i + 1, "expected side<TAB>string<TAB>support<TAB>live");
    }
    const auto side = parse_affix_side(cols[0]);
    if (!side) {
      throw ParseError(src, i + 1, "unknown side '" + std::string(cols[0]) + "'");
    }
    std::uint64_t support = 0;
    auto [ptr, ec] = std::from_chars(cols[2].data(),
                                     cols[2].data() + cols[2].size(), support);
    if (ec != std::errc{} || ptr != cols[2].data() + cols[2].size()) {
      throw ParseError(src, i + 1, "bad support '" + std::string(cols[2]) + "'");
    }
    if (cols[3] != "0" && cols[3] != "1") {
      throw ParseError(src, i + 1, "live must be 0 or 1");
    }
    if (cols[1].empty()) throw ParseError(src, i + 1, "empty affix");
    if (set.find(*side, cols[1])) {
      throw ParseError(src, i + 1, "duplicate affix '" + std::string(cols[1]) + "'");
    }
    set.add(*side, std::string(cols[1]), support, cols[3] == "1");
  }
  return set;
}

}  // namespace morphforest
