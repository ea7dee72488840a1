#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "morphforest/corpus.hpp"

namespace morphforest {

// Generative grammar for synthetic fixtures with known derivations.
struct GrammarSpec {
  std::size_t roots = 20;
  std::size_t root_min_length = 4;
  std::size_t root_max_length = 7;
  std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
  std::vector<std::string> suffixes = {"a", "ka", "lar"};
  std::vector<std::string> prefixes;
  // Longest affix stack on each side.
  std::size_t max_suffixes = 3;
  std::size_t max_prefixes = 1;
  // Affixes offered to extraction that no derivation uses. Explicit ones
  // first; the rest are drawn from root endings.
  std::size_t decoys = 5;
  std::vector<std::string> explicit_decoys;
  double delete_rate = 0.0;    // drop a root-final 'e' before a suffix
  double repeat_rate = 0.0;    // double a root-final consonant
  double compound_rate = 0.0;  // root + root
  double zipf_exponent = 1.0;
  std::uint64_t max_count = 10000;
  std::size_t words = 400;
  std::uint64_t seed = 1;
};

// Throws a kValidation error describing the first inconsistency.
void validate(const GrammarSpec& spec);

// Flat `key = value` text, as used by config files.
std::string serialize_spec(const GrammarSpec& spec);
GrammarSpec parse_spec(std::string_view text,
                       std::string_view source = "<spec>");

struct SynthWord {
  std::string word;
  std::uint64_t count = 0;
  std::vector<std::string> morphs;  // surface segmentation
  std::string root;                 // canonical root (head root of compounds)
};

struct SynthCorpus {
  std::vector<SynthWord> words;  // sorted by count desc, then word
  std::vector<std::string> decoys;
  bool prefix_decoys = false;
  std::vector<std::string> roots;

  Vocabulary vocabulary() const;
  std::string wordlist_tsv() const;
  std::string gold_segmentations_tsv() const;
  std::string gold_clusters_tsv() const;
  std::string gold_roots_tsv() const;
  // Affix TSV with every decoy as a live suffix (prefix decoys when the
  // grammar has prefixes only).
  std::string decoys_tsv() const;
};

SynthCorpus generate(const GrammarSpec& spec);

// words.tsv, gold_seg.tsv, gold_clusters.tsv, gold_roots.tsv, decoys.tsv
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace morphforest
