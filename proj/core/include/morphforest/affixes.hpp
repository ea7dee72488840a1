#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphforest/corpus.hpp"
#include "morphforest/strings.hpp"

namespace morphforest {

enum class AffixSide : std::uint8_t { kSuffix, kPrefix, kTransform };

std::string_view to_string(AffixSide side);
std::optional<AffixSide> parse_affix_side(std::string_view text);

struct AffixId {
  std::uint32_t value = 0;
  friend auto operator<=>(const AffixId&, const AffixId&) = default;
};

struct Affix {
  AffixId id;
  AffixSide side = AffixSide::kSuffix;
  // For transforms this is the marker name, e.g. "del:e".
  std::string text;
  std::uint64_t support = 0;
  bool live = true;
};

// Orthographic changes that accompany suffixation. Each enabled change is
// registered as a prunable transform marker.
struct LanguageProfile {
  bool repeat = false;                // stopping -> stop
  std::u32string delete_chars;        // taking -> take
  std::vector<std::pair<char32_t, char32_t>> modify;  // carried -> carry

  static LanguageProfile english();
  static LanguageProfile german();
  static LanguageProfile none() { return {}; }
  // "english", "german" or "none".
  static std::optional<LanguageProfile> named(std::string_view name);
};

std::string repeat_marker();
std::string delete_marker(char32_t c);
std::string modify_marker(char32_t from, char32_t to);

// Prefix, suffix and transform-marker inventory with liveness flags.
// Ids are dense and stable; live flags only ever go from true to false.
class AffixSet {
 public:
  // Throws on a duplicate (side, text) or empty text.
  AffixId add(AffixSide side, std::string text, std::uint64_t support,
              bool live = true);

  std::span<const Affix> all() const { return affixes_; }
  std::size_t size() const { return affixes_.size(); }
  const Affix& at(AffixId id) const { return affixes_.at(id.value); }
  bool is_live(AffixId id) const { return at(id).live; }

  std::optional<AffixId> find(AffixSide side, std::string_view text) const;
  std::optional<AffixId> find_live(AffixSide side,
                                   std::string_view text) const;

  std::vector<AffixId> live_ids() const;
  std::size_t live_count() const;
  std::size_t live_count(AffixSide side) const;

  // "suf:ing", "pre:un", "tr:del:e"
  std::string label(AffixId id) const;
  std::optional<AffixId> find_label(std::string_view label) const;

  // Length of the longest live affix on a side, in code points.
  std::size_t max_live_length(AffixSide side) const;

  // Adds the profile's markers that are not already present.
  void register_transforms(const LanguageProfile& profile);

 private:
  friend AffixSet prune(const AffixSet&, std::span<const AffixId>);

  std::vector<Affix> affixes_;
  StringMap<AffixId> by_key_;
};

struct ExtractionOptions {
  enum class Budget { kPerSide, kTotal };

  std::size_t max_per_side = 500;
  std::uint64_t min_support = 2;
  std::size_t min_parent_length = 3;
  std::size_t max_affix_length = 6;
  // kTotal applies `max_per_side` to prefixes and suffixes jointly.
  Budget budget = Budget::kPerSide;
};

// Counts string differences between vocabulary pairs: for w = p + s with p
// in the vocabulary, s is a suffix occurrence; for w = s + p, a prefix one.
AffixSet extract_affixes(const Vocabulary& vocab,
                         const ExtractionOptions& options = {});

// Keeps exactly `kept` live. Throws if `kept` names a dead affix.
AffixSet prune(const AffixSet& affixes, std::span<const AffixId> kept);

// `side<TAB>string<TAB>support<TAB>live` per line.
std::string serialize_affixes(const AffixSet& affixes);
AffixSet parse_affixes(std::string_view text,
                       std::string_view source = "<affixes>");

}  // namespace morphforest
