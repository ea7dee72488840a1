#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "morphforest/strings.hpp"

namespace morphforest {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static PRF from(double precision, double recall);
};

using BoundarySet = std::set<std::size_t>;

// Internal split positions (in code points) of a morph sequence.
BoundarySet boundaries_of(const std::vector<std::string>& morphs);

// Alternatives per word, each a list of surface morphs.
using GoldSegmentations = StringMap<std::vector<std::vector<std::string>>>;
using GoldClusters = StringMap<std::string>;
using GoldRoots = StringMap<std::vector<std::string>>;

struct BprResult {
  PRF prf;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t words = 0;
};

enum class Averaging { kMicro, kMacro };

// Boundary precision/recall. Per word the gold alternative with the best F1
// is used; counts are pooled (micro) or per-word scores averaged (macro).
// Throws if a predicted word is missing from gold.
BprResult bpr(const StringMap<BoundarySet>& predicted,
              const GoldSegmentations& gold,
              Averaging averaging = Averaging::kMicro);

struct ClusterResult {
  double correct = 0.0;
  double inserted = 0.0;
  double deleted = 0.0;
  PRF prf;
  std::size_t words = 0;
};

// word -> cluster id for both sides; scored on the shared words only.
ClusterResult cluster_prf(const StringMap<std::string>& predicted,
                          const GoldClusters& gold);

struct RootResult {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t words = 0;
};

RootResult root_accuracy(const StringMap<std::string>& predicted,
                         const GoldRoots& gold);

// File formats. `normalize` applies the ingestion normalization to words.
GoldSegmentations parse_gold_segmentations(std::string_view text,
                                           bool lowercase = true,
                                           std::string_view source = "<gold>");
GoldClusters parse_gold_clusters(std::string_view text, bool lowercase = true,
                                 std::string_view source = "<gold>");
GoldRoots parse_gold_roots(std::string_view text, bool lowercase = true,
                           std::string_view source = "<gold>");

// `word<TAB>m1 m2 ...`, first alternative taken.
StringMap<BoundarySet> parse_predicted_segmentations(
    std::string_view text, bool lowercase = true,
    std::string_view source = "<pred>");
// `cluster_id<TAB>word`, the families output.
StringMap<std::string> parse_predicted_families(
    std::string_view text, bool lowercase = true,
    std::string_view source = "<pred>");
// `word<TAB>root`
StringMap<std::string> parse_predicted_roots(
    std::string_view text, bool lowercase = true,
    std::string_view source = "<pred>");

std::string to_json(const BprResult& result);
std::string to_json(const ClusterResult& result);
std::string to_json(const RootResult& result);

}  // namespace morphforest
