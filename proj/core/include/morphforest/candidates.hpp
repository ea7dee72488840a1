#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "morphforest/affixes.hpp"
#include "morphforest/corpus.hpp"

namespace morphforest {

enum class DerivationType : std::uint8_t {
  kStop,
  kSuffix,
  kPrefix,
  kModify,
  kDelete,
  kRepeat,
  kCompoundLeft,
  kCompoundRight,
};

std::string_view to_string(DerivationType type);
std::optional<DerivationType> parse_derivation_type(std::string_view text);

inline bool is_compound(DerivationType t) {
  return t == DerivationType::kCompoundLeft ||
         t == DerivationType::kCompoundRight;
}

// One potential parent edge of `child`.
struct Candidate {
  std::string child;
  // Equal to child for kStop; may lie outside the vocabulary otherwise.
  std::string parent;
  DerivationType dtype = DerivationType::kStop;
  // Sorted; a suffix plus at most one transform marker.
  std::vector<AffixId> affix_ids;
  double log_prob = 0.0;
};

struct CandidateOptions {
  std::size_t min_stem = 2;
  std::size_t min_compound_part = 3;
  bool compounds = false;
  bool compound_requires_both = true;
  LanguageProfile profile = LanguageProfile::english();
};

// C(w). The stop candidate is always first; the rest are deduplicated on
// (parent, dtype) and every non-stop parent is strictly shorter than w.
std::vector<Candidate> gen_candidates(std::string_view word,
                                      const Vocabulary& vocab,
                                      const AffixSet& affixes,
                                      const CandidateOptions& options);

// Position (in code points of the child) of the surface boundary that the
// candidate introduces; nullopt for stop.
std::optional<std::size_t> surface_boundary(const Candidate& candidate);

struct Neighborhood {
  std::string word;
  // The word itself first, then single adjacent transpositions.
  std::vector<std::string> neighbors;
};

// N(w): w plus distinct strings from one adjacent swap. When there are
// more than `max_neighbors` swaps a seeded sample of that size is kept.
Neighborhood gen_neighbors(std::string_view word, std::size_t max_neighbors,
                           std::uint64_t seed = 0);

}  // namespace morphforest
