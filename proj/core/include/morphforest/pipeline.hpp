#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphforest/affixes.hpp"
#include "morphforest/candidates.hpp"
#include "morphforest/corpus.hpp"
#include "morphforest/features.hpp"
#include "morphforest/ilp.hpp"
#include "morphforest/model.hpp"
#include "morphforest/strings.hpp"

namespace morphforest {

// A word's chosen outgoing edge. Roots carry a stop self-edge.
struct Edge {
  std::string parent;
  DerivationType dtype = DerivationType::kStop;
  std::vector<AffixId> affix_ids;
  double log_prob = 0.0;
};

// One edge per vocabulary word, in vocabulary order.
class Forest {
 public:
  // Throws if the word already has an edge or the edge would not shorten
  // the word.
  void add(std::string word, Edge edge);

  std::size_t size() const { return words_.size(); }
  std::span<const std::string> words() const { return words_; }
  std::span<const Edge> edges() const { return edges_; }
  const Edge* find(std::string_view word) const;

  // |F|, the number of stop edges.
  std::size_t tree_count() const;
  // Union of affixes over all edges, sorted.
  std::vector<AffixId> used_affixes() const;

 private:
  std::vector<std::string> words_;
  std::vector<Edge> edges_;
  StringMap<std::size_t> index_;
};

// `child<TAB>parent<TAB>dtype<TAB>affixes<TAB>logprob`; affixes are
// comma-separated labels or "-".
std::string serialize_forest(const Forest& forest, const AffixSet& affixes);
Forest parse_forest(std::string_view text, const AffixSet& affixes,
                    std::string_view source = "<forest>");

// -(sum log Pr(e))/|E| + alpha |Affix_used| + beta |F|/|V|
double score_forest(const Forest& forest, double alpha, double beta);

// counter(parent) from the forest's non-stop edges.
SiblingTable sibling_table_from_forest(const Forest& forest);

struct TrainConfig {
  double alpha = 1e-4;
  double beta = 0.5;
  bool allow_negative_beta = false;
  std::size_t rounds = 5;
  AdamOptions adam;
  bool warm_start = true;
  FeatureOptions features;
  CandidateOptions candidates;
  ExtractionOptions extraction;
  IlpOptions ilp;
  std::size_t max_neighbors = 25;
  std::uint64_t seed = 1;
};

struct RoundReport {
  std::size_t round = 0;
  std::vector<double> losses;
  std::size_t live_affixes_before = 0;
  std::size_t live_affixes = 0;
  std::size_t rejected = 0;
  double ilp_objective = 0.0;
  double score = 0.0;  // S(F) of the round's forest
  std::size_t trees = 0;
  std::optional<Proof> proof;  // empty when the ILP is off
  std::uint64_t nodes = 0;
  std::string warning;  // solver fallbacks
};

struct TrainResult {
  std::vector<RoundReport> rounds;
  Forest forest;
  AffixSet affixes;  // final liveness
  Weights weights;
  SiblingTable siblings;  // table used by the final round's features
};

// Alternates contrastive estimation with the affix ILP. `injected`
// affixes are added to the extracted inventory before the first round.
TrainResult train(const Vocabulary& vocab, const WordVectors& vectors,
                  const TrainConfig& config, const AffixSet& injected = {});

// Scores candidate edges of arbitrary strings with trained weights; used
// for out-of-vocabulary parents and unseen words.
class EdgeModel {
 public:
  EdgeModel(const Vocabulary& vocab, const WordVectors& vectors,
            AffixSet affixes, SiblingTable siblings, const Weights& weights,
            const TrainConfig& config);

  // Candidates with log_prob filled, stop first.
  std::vector<Candidate> scored_candidates(std::string_view word) const;
  // Greedy argmax; ties prefer stop, then the smallest parent.
  Edge best_edge(std::string_view word) const;

  const AffixSet& affixes() const { return affixes_; }

 private:
  const Vocabulary& vocab_;
  const WordVectors& vectors_;
  AffixSet affixes_;
  SiblingTable siblings_;
  FeatureIndex index_;
  Theta theta_;
  TrainConfig config_;
};

struct Segmentation {
  std::vector<std::string> morphs;
  std::vector<std::size_t> boundaries;  // internal, in code points
};

struct Family {
  std::string root;
  std::vector<std::string> members;  // vocabulary order
};

// Reads forests. Vocabulary words follow their forest edge; other strings
// use the model when one is given and stop otherwise.
class Decoder {
 public:
  explicit Decoder(const Forest& forest, const EdgeModel* model = nullptr)
      : forest_(forest), model_(model) {}

  Edge edge(std::string_view word) const;
  Segmentation segment(std::string_view word, bool recurse = true) const;
  std::string root_of(std::string_view word) const;
  // Vocabulary words grouped by root, sorted by root string.
  std::vector<Family> families() const;

 private:
  const Forest& forest_;
  const EdgeModel* model_;
};

}  // namespace morphforest
