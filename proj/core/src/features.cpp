#include "morphforest/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "morphforest/error.hpp"
#include "morphforest/io.hpp"
#include "morphforest/utf8.hpp"

namespace morphforest {

namespace {

int frequency_bin(std::uint64_t count, const FeatureOptions& options) {
  const double x = std::log1p(static_cast<double>(count)) /
                   std::max(options.freq_bin_width, 1e-12);
  return std::min(options.freq_bin_cap, static_cast<int>(std::floor(x)));
}

std::string last_two(std::u32string_view s) {
  if (s.size() >= 2) return utf8::encode(s.substr(s.size() - 2));
  return "^" + utf8::encode(s);
}

std::string first_two(std::u32string_view s) {
  if (s.size() >= 2) return utf8::encode(s.substr(0, 2));
  return utf8::encode(s) + "$";
}

}  // namespace

std::optional<std::uint32_t> FeatureIndex::intern(std::string_view name) {
  if (auto id = find(name)) return id;
  if (frozen_) return std::nullopt;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(std::string(name), id);
  return id;
}

std::optional<std::uint32_t> FeatureIndex::find(std::string_view name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

SparseVector SparseVector::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  SparseVector out;
  for (const auto& [id, value] : entries) {
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::kNumerical,
                  "non-finite feature value for id " + std::to_string(id));
    }
    if (!out.entries_.empty() && out.entries_.back().first == id) {
      out.entries_.back().second += value;
    } else {
      out.entries_.push_back({id, value});
    }
  }
  std::erase_if(out.entries_, [](const Entry& e) { return e.second == 0.0; });
  return out;
}

double SparseVector::dot(std::span<const double> weights) const {
  double sum = 0.0;
  for (const auto& [id, value] : entries_) sum += weights[id] * value;
  return sum;
}

std::optional<double> SparseVector::get(std::uint32_t id) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), id,
      [](const Entry& e, std::uint32_t key) { return e.first < key; });
  if (it == entries_.end() || it->first != id) return std::nullopt;
  return it->second;
}

NamedFeatures feature_names(const Candidate& z, const FeatureContext& ctx,
                            const FeatureOptions& options) {
  NamedFeatures out;
  const std::string dtype(to_string(z.dtype));
  out.emplace_back("type=" + dtype, 1.0);
  for (AffixId id : z.affix_ids) {
    out.emplace_back("affix=" + ctx.affixes.label(id), 1.0);
  }

  const std::u32string w = utf8::decode(z.child);
  if (z.dtype == DerivationType::kStop) {
    out.emplace_back("stop.begin=" + first_two(w), 1.0);
    out.emplace_back("stop.end=" + last_two(w), 1.0);
    return out;
  }

  const std::size_t boundary = surface_boundary(z).value_or(0);
  const std::u32string_view wv(w);
  out.emplace_back("bigram.left=" + dtype + ":" + last_two(wv.substr(0, boundary)),
                   1.0);
  out.emplace_back("bigram.right=" + dtype + ":" + first_two(wv.substr(boundary)),
                   1.0);

  const auto* child_vec = ctx.vectors.find(z.child);
  const auto* parent_vec = ctx.vectors.find(z.parent);
  std::optional<double> cos;
  if (child_vec && parent_vec) cos = cosine(*child_vec, *parent_vec);
  if (cos) {
    out.emplace_back("cos", *cos);
  } else {
    out.emplace_back("cos.oov", 1.0);
  }

  const std::uint64_t parent_count = ctx.vocab.count(z.parent);
  if (ctx.vocab.contains(z.parent)) out.emplace_back("parent.invocab", 1.0);
  out.emplace_back("freq.bin=" + std::to_string(frequency_bin(parent_count, options)),
                   1.0);

  if (options.siblings) {
    const auto siblings = sibling_count(ctx.siblings, z.parent);
    if (siblings > 0) {
      out.emplace_back("sibl", std::log1p(static_cast<double>(siblings)));
    }
  }

  if (options.compounds && is_compound(z.dtype)) {
    const std::u32string parent = utf8::decode(z.parent);
    const std::string other =
        z.dtype == DerivationType::kCompoundLeft
            ? utf8::encode(wv.substr(parent.size()))
            : utf8::encode(wv.substr(0, w.size() - parent.size()));
    if (ctx.vocab.contains(z.parent) && ctx.vocab.contains(other)) {
      out.emplace_back("comp.both_invocab", 1.0);
    }
    const auto min_count =
        std::min(parent_count, ctx.vocab.count(other));
    out.emplace_back("comp.minfreq=" +
                         std::to_string(frequency_bin(min_count, options)),
                     1.0);
  }
  return out;
}

SparseVector featurize(const Candidate& candidate, const FeatureContext& ctx,
                       const FeatureOptions& options, FeatureIndex& index) {
  std::vector<SparseVector::Entry> entries;
  for (auto& [name, value] : feature_names(candidate, ctx, options)) {
    if (auto id = index.intern(name)) entries.push_back({*id, value});
  }
  return SparseVector::from_entries(std::move(entries));
}

SparseVector featurize(const Candidate& candidate, const FeatureContext& ctx,
                       const FeatureOptions& options,
                       const FeatureIndex& index) {
  std::vector<SparseVector::Entry> entries;
  for (auto& [name, value] : feature_names(candidate, ctx, options)) {
    if (auto id = index.find(name)) entries.push_back({*id, value});
  }
  return SparseVector::from_entries(std::move(entries));
}

SiblingTable build_sibling_table(const Vocabulary& vocab,
                                 const AffixSet& affixes,
                                 std::size_t min_stem) {
  SiblingTable table;
  for (const auto& entry : vocab.entries()) {
    const std::u32string w = utf8::decode(entry.word);
    const std::size_t n = w.size();
    for (std::size_t k = 1; k < n; ++k) {
      if (n - k < min_stem) break;
      if (affixes.find_live(AffixSide::kSuffix, utf8::encode(w.substr(n - k)))) {
        ++table[utf8::encode(w.substr(0, n - k))];
      }
      if (affixes.find_live(AffixSide::kPrefix, utf8::encode(w.substr(0, k)))) {
        ++table[utf8::encode(w.substr(k))];
      }
    }
  }
  return table;
}

std::uint64_t sibling_count(const SiblingTable& table,
                            std::string_view parent) {
  auto it = table.find(parent);
  if (it == table.end() || it->second == 0) return 0;
  return it->second - 1;
}

std::string serialize_siblings(const SiblingTable& table) {
  std::vector<std::pair<std::string, std::uint64_t>> rows(table.begin(),
                                                          table.end());
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (const auto& [parent, count] : rows) {
    out += parent;
    out += '\t';
    out += std::to_string(count);
    out += '\n';
  }
  return out;
}

SiblingTable parse_siblings(std::string_view text, std::string_view source) {
  SiblingTable table;
  const auto all = io::lines(text);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (io::trim(all[i]).empty()) continue;
    const auto cols = io::split(all[i], '\t');
    std::uint64_t count = 0;
    if (cols.size() != 2 ||
        std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), count)
                .ptr != cols[1].data() + cols[1].size()) {
      throw ParseError(std::string(source), i + 1, "expected parent<TAB>count");
    }
    table[std::string(cols[0])] = count;
  }
  return table;
}

}  // namespace morphforest
