#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphforest/affixes.hpp"
#include "morphforest/candidates.hpp"
#include "morphforest/corpus.hpp"
#include "morphforest/strings.hpp"

namespace morphforest {

// Dense ids for feature names. After freeze() unseen names are dropped.
class FeatureIndex {
 public:
  // Returns the id, adding the name unless frozen.
  std::optional<std::uint32_t> intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::span<const std::string> names() const { return names_; }

 private:
  std::vector<std::string> names_;
  StringMap<std::uint32_t> ids_;
  bool frozen_ = false;
};

// Ids strictly increasing, values finite and nonzero.
class SparseVector {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  SparseVector() = default;
  // Sorts, sums duplicate ids and drops zeros.
  static SparseVector from_entries(std::vector<Entry> entries);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double dot(std::span<const double> weights) const;
  std::optional<double> get(std::uint32_t id) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<Entry> entries_;
};

// parent string -> number of vocabulary words that strip to it.
using SiblingTable = StringMap<std::uint64_t>;

struct FeatureOptions {
  bool siblings = false;
  bool compounds = false;
  double freq_bin_width = 1.0;
  int freq_bin_cap = 12;
};

struct FeatureContext {
  const Vocabulary& vocab;
  const WordVectors& vectors;
  const AffixSet& affixes;
  const SiblingTable& siblings;
};

using NamedFeatures = std::vector<std::pair<std::string, double>>;

// phi(w, z) with readable names, in emission order.
NamedFeatures feature_names(const Candidate& candidate,
                            const FeatureContext& ctx,
                            const FeatureOptions& options);

// phi(w, z) through `index`; interns new names unless the index is frozen.
SparseVector featurize(const Candidate& candidate, const FeatureContext& ctx,
                       const FeatureOptions& options, FeatureIndex& index);
// Lookup-only variant for frozen indexes.
SparseVector featurize(const Candidate& candidate, const FeatureContext& ctx,
                       const FeatureOptions& options,
                       const FeatureIndex& index);

// Strips every live prefix/suffix from every vocabulary word and counts
// the resulting parent strings.
SiblingTable build_sibling_table(const Vocabulary& vocab,
                                 const AffixSet& affixes,
                                 std::size_t min_stem = 2);

// counter(parent) - 1, floored at zero.
std::uint64_t sibling_count(const SiblingTable& table,
                            std::string_view parent);

std::string serialize_siblings(const SiblingTable& table);
SiblingTable parse_siblings(std::string_view text,
                            std::string_view source = "<siblings>");

}  // namespace morphforest
