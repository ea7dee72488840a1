#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphforest/strings.hpp"

namespace morphforest {

struct WordCount {
  std::string word;
  std::uint64_t count = 0;

  friend bool operator==(const WordCount&, const WordCount&) = default;
};

struct CorpusOptions {
  bool lowercase = true;
  // Drop tokens containing anything but letters and combining marks.
  bool filter_nonalpha = true;
};

// Frequency-ranked word list. Entries are unique, sorted by count
// descending with ties broken lexicographically. Immutable once built.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Sums duplicate surface forms, ranks, and keeps the first `top_k`.
  // Words are taken as given (already normalized).
  static Vocabulary from_counts(std::vector<WordCount> counts,
                                std::size_t top_k);

  std::span<const WordCount> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::string& word(std::size_t rank) const {
    return entries_[rank].word;
  }

  std::optional<std::size_t> rank(std::string_view word) const;
  bool contains(std::string_view word) const {
    return index_.find(word) != index_.end();
  }
  // Zero for words outside the vocabulary.
  std::uint64_t count(std::string_view word) const;
  std::uint64_t total_tokens() const { return total_tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<WordCount> entries_;
  StringMap<std::size_t> index_;
  std::uint64_t total_tokens_ = 0;
};

// `word<TAB>count` lines; blank and `#` lines are skipped.
Vocabulary parse_wordlist(std::string_view text, std::size_t top_k,
                          const CorpusOptions& options = {},
                          std::string_view source = "<wordlist>");
Vocabulary load_wordlist(const std::filesystem::path& path, std::size_t top_k,
                         const CorpusOptions& options = {});
std::string serialize_wordlist(const Vocabulary& vocab);

class WordVectors {
 public:
  WordVectors() = default;
  explicit WordVectors(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }
  bool empty() const { return table_.empty(); }

  // Throws on dimension mismatch or non-finite components.
  void insert(std::string word, std::vector<double> vector);
  const std::vector<double>* find(std::string_view word) const;

 private:
  std::size_t dim_ = 0;
  StringMap<std::vector<double>> table_;
};

enum class VectorRetention {
  kAll,         // keep every vector; OOV parents can still be compared
  kVocabulary,  // keep vocabulary words only
};

// word2vec text format with an optional `N dim` header line.
WordVectors parse_vectors(std::string_view text, const Vocabulary& vocab,
                          VectorRetention retention = VectorRetention::kAll,
                          const CorpusOptions& options = {},
                          std::string_view source = "<vectors>");
WordVectors load_vectors(const std::filesystem::path& path,
                         const Vocabulary& vocab,
                         VectorRetention retention = VectorRetention::kAll,
                         const CorpusOptions& options = {});

// Cosine similarity; nullopt when either vector is all zeros.
// Throws on length mismatch.
std::optional<double> cosine(std::span<const double> a,
                             std::span<const double> b);

}  // namespace morphforest
