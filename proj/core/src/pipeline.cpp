#include "morphforest/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "morphforest/error.hpp"
#include "morphforest/io.hpp"
#include "morphforest/utf8.hpp"

namespace morphforest {

void Forest::add(std::string word, Edge edge) {
  if (index_.contains(word)) {
    throw_contract("forest: '" + word + "' already has an edge");
  }
  if (edge.dtype == DerivationType::kStop) {
    if (edge.parent != word) {
      throw_contract("forest: stop edge of '" + word + "' must point to itself");
    }
  } else if (utf8::length(edge.parent) >= utf8::length(word)) {
    throw_contract("forest: edge '" + word + "' -> '" + edge.parent +
                   "' does not shorten the word");
  }
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  edges_.push_back(std::move(edge));
}

const Edge* Forest::find(std::string_view word) const {
  auto it = index_.find(word);
  return it == index_.end() ? nullptr : &edges_[it->second];
}

std::size_t Forest::tree_count() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) {
        return e.dtype == DerivationType::kStop;
      }));
}

std::vector<AffixId> Forest::used_affixes() const {
  std::set<AffixId> used;
  for (const auto& e : edges_) used.insert(e.affix_ids.begin(), e.affix_ids.end());
  return {used.begin(), used.end()};
}

std::string serialize_forest(const Forest& forest, const AffixSet& affixes) {
  std::string out;
  for (std::size_t i = 0; i < forest.size(); ++i) {
    const Edge& e = forest.edges()[i];
    out += forest.words()[i];
    out += '\t';
    out += e.parent;
    out += '\t';
    out += to_string(e.dtype);
    out += '\t';
    if (e.affix_ids.empty()) {
      out += '-';
    } else {
      for (std::size_t a = 0; a < e.affix_ids.size(); ++a) {
        if (a > 0) out += ',';
        out += affixes.label(e.affix_ids[a]);
      }
    }
    out += '\t';
    out += io::format_double(e.log_prob);
    out += '\n';
  }
  return out;
}

Forest parse_forest(std::string_view text, const AffixSet& affixes,
                    std::string_view source) {
  const std::string src(source);
  Forest forest;
  const auto all = io::lines(text);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::size_t line = i + 1;
    if (io::trim(all[i]).empty() || all[i].front() == '#') continue;
    const auto f = io::split(all[i], '\t');
    if (f.size() != 5) throw ParseError(src, line, "expected 5 tab-separated fields");
    Edge e;
    e.parent = std::string(f[1]);
    const auto dtype = parse_derivation_type(f[2]);
    if (!dtype) {
      throw ParseError(src, line, "unknown derivation type '" + std::string(f[2]) + "'");
    }
    e.dtype = *dtype;
    if (f[3] != "-") {
      for (auto label : io::split(f[3], ',')) {
        const auto id = affixes.find_label(label);
        if (!id) {
          throw ParseError(src, line, "unknown affix '" + std::string(label) + "'");
        }
        e.affix_ids.push_back(*id);
      }
      std::sort(e.affix_ids.begin(), e.affix_ids.end());
    }
    try {
      std::size_t used = 0;
      e.log_prob = std::stod(std::string(f[4]), &used);
      if (used != f[4].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(src, line, "bad log-probability '" + std::string(f[4]) + "'");
    }
    try {
      forest.add(std::string(f[0]), std::move(e));
    } catch (const Error& err) {
      throw ParseError(src, line, err.what());
    }
  }
  return forest;
}

double score_forest(const Forest& forest, double alpha, double beta) {
  if (forest.size() == 0) return 0.0;
  const double n = static_cast<double>(forest.size());
  double sum = 0.0;
  for (const auto& e : forest.edges()) sum += e.log_prob;
  return -sum / n +
         alpha * static_cast<double>(forest.used_affixes().size()) +
         beta * static_cast<double>(forest.tree_count()) / n;
}

SiblingTable sibling_table_from_forest(const Forest& forest) {
  SiblingTable table;
  for (const auto& e : forest.edges()) {
    if (e.dtype != DerivationType::kStop) ++table[e.parent];
  }
  return table;
}

namespace {

// Argmax of log_prob; ties prefer stop, then the smaller parent.
std::size_t local_argmax(const std::vector<Candidate>& cands) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < cands.size(); ++j) {
    const auto& a = cands[j];
    const auto& b = cands[best];
    if (a.log_prob > b.log_prob ||
        (a.log_prob == b.log_prob && b.dtype != DerivationType::kStop &&
         a.parent < b.parent)) {
      best = j;
    }
  }
  return best;
}

Edge edge_of(const Candidate& c) {
  return {c.parent, c.dtype, c.affix_ids, c.log_prob};
}

Forest forest_from(const std::vector<std::vector<Candidate>>& cands,
                   std::span<const std::uint32_t> choice) {
  Forest forest;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto& c = cands[i][choice[i]];
    forest.add(c.child, edge_of(c));
  }
  return forest;
}

struct RoundData {
  std::vector<std::vector<Candidate>> cands;       // per vocabulary word
  std::vector<std::vector<SparseVector>> features;  // aligned with cands
  ContrastiveProblem problem;
  FeatureIndex index;
};

RoundData build_round(const Vocabulary& vocab, const WordVectors& vectors,
                      const AffixSet& affixes, const SiblingTable& siblings,
                      const TrainConfig& config) {
  RoundData d;
  const FeatureContext ctx{vocab, vectors, affixes, siblings};
  StringMap<std::uint32_t> blocks;
  std::vector<SparseVector> feats;

  auto block_of = [&](const std::string& s,
                      std::vector<Candidate>* keep_cands,
                      std::vector<SparseVector>* keep_feats) {
    if (auto it = blocks.find(s); it != blocks.end() && !keep_cands) {
      return it->second;
    }
    auto cands = gen_candidates(s, vocab, affixes, config.candidates);
    feats.clear();
    for (const auto& c : cands) {
      feats.push_back(featurize(c, ctx, config.features, d.index));
    }
    const auto id = d.problem.add_block(feats);
    blocks.emplace(s, id);
    if (keep_cands) *keep_cands = std::move(cands);
    if (keep_feats) *keep_feats = feats;
    return id;
  };

  const std::size_t n = vocab.size();
  d.cands.resize(n);
  d.features.resize(n);
  std::vector<std::uint32_t> own(n);
  for (std::size_t i = 0; i < n; ++i) {
    own[i] = block_of(vocab.word(i), &d.cands[i], &d.features[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto hood = gen_neighbors(vocab.word(i), config.max_neighbors,
                                    config.seed);
    std::vector<std::uint32_t> ids;
    ids.reserve(hood.neighbors.size());
    ids.push_back(own[i]);
    for (std::size_t k = 1; k < hood.neighbors.size(); ++k) {
      ids.push_back(block_of(hood.neighbors[k], nullptr, nullptr));
    }
    d.problem.add_example(own[i], std::move(ids));
  }
  d.problem.set_num_features(d.index.size());
  return d;
}

AffixSet initial_affixes(const Vocabulary& vocab, const TrainConfig& config,
                         const AffixSet& injected) {
  AffixSet affixes = extract_affixes(vocab, config.extraction);
  for (const auto& a : injected.all()) {
    if (!a.live || affixes.find(a.side, a.text)) continue;
    affixes.add(a.side, a.text, a.support);
  }
  affixes.register_transforms(config.candidates.profile);
  return affixes;
}

}  // namespace

TrainResult train(const Vocabulary& vocab, const WordVectors& vectors,
                  const TrainConfig& config, const AffixSet& injected) {
  if (vocab.empty()) {
    throw Error(ErrorKind::kEmptyVocabulary, "train: empty vocabulary");
  }
  if (config.rounds == 0) throw_contract("train: rounds must be positive");

  TrainResult result;
  AffixSet affixes = initial_affixes(vocab, config, injected);
  SiblingTable siblings;
  if (config.features.siblings) {
    siblings = build_sibling_table(vocab, affixes, config.candidates.min_stem);
  }
  const bool ilp_on = config.ilp.mode != IlpMode::kOff;
  const std::size_t rounds = ilp_on ? config.rounds : 1;
  const double beta =
      config.allow_negative_beta ? config.beta : std::max(0.0, config.beta);
  Weights weights;

  for (std::size_t t = 1; t <= rounds; ++t) {
    RoundReport report;
    report.round = t;
    report.live_affixes_before = affixes.live_count();

    RoundData d = build_round(vocab, vectors, affixes, siblings, config);
    Theta theta0 = config.warm_start && t > 1
                       ? weights.align(d.index)
                       : Theta(d.index.size(), 0.0);
    FitResult fit = adam_fit(d.problem, std::move(theta0), config.adam);
    weights = Weights::from(d.index, fit.theta);
    report.losses = std::move(fit.losses);
    for (std::size_t i = 0; i < d.cands.size(); ++i) {
      score_candidates(d.cands[i], d.features[i], fit.theta);
    }

    std::vector<std::uint32_t> choice(d.cands.size());
    AffixSet next = affixes;
    if (ilp_on) {
      const IlpInstance inst = build_instance(d.cands, affixes, config.alpha,
                                              config.beta,
                                              config.allow_negative_beta);
      const IlpSolution sol = solve(inst, config.ilp);
      choice = sol.choice;
      std::vector<AffixId> kept;
      for (auto k : sol.open_affixes) kept.push_back(inst.affix_ids[k]);
      next = prune(affixes, kept);
      report.ilp_objective = sol.objective;
      report.proof = sol.proof;
      report.nodes = sol.nodes;
      report.warning = sol.warning;
    } else {
      for (std::size_t i = 0; i < d.cands.size(); ++i) {
        choice[i] = static_cast<std::uint32_t>(local_argmax(d.cands[i]));
      }
    }

    result.forest = forest_from(d.cands, choice);
    result.siblings = siblings;
    report.live_affixes = next.live_count();
    report.rejected = report.live_affixes_before - report.live_affixes;
    report.score = score_forest(result.forest, config.alpha, beta);
    report.trees = result.forest.tree_count();
    if (!ilp_on) report.ilp_objective = report.score;
    result.rounds.push_back(std::move(report));
    affixes = std::move(next);

    if (result.rounds.back().rejected == 0) break;
    if (config.features.siblings) {
      siblings = sibling_table_from_forest(result.forest);
    }
  }
  result.affixes = std::move(affixes);
  result.weights = std::move(weights);
  return result;
}

EdgeModel::EdgeModel(const Vocabulary& vocab, const WordVectors& vectors,
                     AffixSet affixes, SiblingTable siblings,
                     const Weights& weights, const TrainConfig& config)
    : vocab_(vocab), vectors_(vectors), affixes_(std::move(affixes)),
      siblings_(std::move(siblings)), config_(config) {
  for (const auto& name : weights.names) index_.intern(name);
  index_.freeze();
  theta_ = weights.align(index_);
}

std::vector<Candidate> EdgeModel::scored_candidates(std::string_view word) const {
  auto cands = gen_candidates(word, vocab_, affixes_, config_.candidates);
  const FeatureContext ctx{vocab_, vectors_, affixes_, siblings_};
  std::vector<SparseVector> feats;
  feats.reserve(cands.size());
  for (const auto& c : cands) {
    feats.push_back(featurize(c, ctx, config_.features, index_));
  }
  score_candidates(cands, feats, theta_);
  return cands;
}

Edge EdgeModel::best_edge(std::string_view word) const {
  const auto cands = scored_candidates(word);
  return edge_of(cands[local_argmax(cands)]);
}

Edge Decoder::edge(std::string_view word) const {
  if (const Edge* e = forest_.find(word)) return *e;
  if (model_) return model_->best_edge(word);
  return {std::string(word), DerivationType::kStop, {}, 0.0};
}

namespace {

// Internal boundaries of `word`, in code points, following its chain.
void collect(const Decoder& dec, std::string_view word, bool recurse,
             std::size_t offset, std::set<std::size_t>& out);

void collect_edge(const Decoder& dec, std::string_view word, const Edge& e,
                  bool recurse, std::size_t offset,
                  std::set<std::size_t>& out) {
  const std::size_t n = utf8::length(word);
  const std::size_t p = utf8::length(e.parent);
  auto add = [&](std::size_t b) {
    if (b > 0 && b < n) out.insert(offset + b);
  };
  // Boundaries of a part strictly inside [0, limit).
  auto part = [&](std::string_view s, std::size_t shift, std::size_t limit) {
    if (!recurse) return;
    std::set<std::size_t> inner;
    collect(dec, s, true, 0, inner);
    for (auto b : inner) {
      if (b < limit) add(shift + b);
    }
  };
  switch (e.dtype) {
    case DerivationType::kStop:
      return;
    case DerivationType::kSuffix:
    case DerivationType::kRepeat:
    case DerivationType::kModify:
      part(e.parent, 0, p);
      add(p);
      return;
    case DerivationType::kDelete:
      part(e.parent, 0, p - 1);
      add(p - 1);
      return;
    case DerivationType::kPrefix:
      part(e.parent, n - p, p);
      add(n - p);
      return;
    case DerivationType::kCompoundLeft: {
      part(e.parent, 0, p);
      add(p);
      const std::u32string w = utf8::decode(word);
      part(utf8::encode(w.substr(p)), p, n - p);
      return;
    }
    case DerivationType::kCompoundRight: {
      const std::u32string w = utf8::decode(word);
      part(utf8::encode(w.substr(0, n - p)), 0, n - p);
      add(n - p);
      part(e.parent, n - p, p);
      return;
    }
  }
}

void collect(const Decoder& dec, std::string_view word, bool recurse,
             std::size_t offset, std::set<std::size_t>& out) {
  collect_edge(dec, word, dec.edge(word), recurse, offset, out);
}

}  // namespace

Segmentation Decoder::segment(std::string_view word, bool recurse) const {
  if (word.empty()) throw_contract("segment: empty word");
  std::set<std::size_t> bounds;
  collect(*this, word, recurse, 0, bounds);
  Segmentation seg;
  seg.boundaries.assign(bounds.begin(), bounds.end());
  const std::u32string w = utf8::decode(word);
  std::size_t start = 0;
  for (auto b : bounds) {
    seg.morphs.push_back(utf8::encode(w.substr(start, b - start)));
    start = b;
  }
  seg.morphs.push_back(utf8::encode(w.substr(start)));
  return seg;
}

std::string Decoder::root_of(std::string_view word) const {
  std::string current(word);
  for (;;) {
    Edge e = edge(current);
    if (e.dtype == DerivationType::kStop) return current;
    current = std::move(e.parent);
  }
}

std::vector<Family> Decoder::families() const {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& w : forest_.words()) groups[root_of(w)].push_back(w);
  std::vector<Family> out;
  out.reserve(groups.size());
  for (auto& [root, members] : groups) out.push_back({root, std::move(members)});
  return out;
}

}  // namespace morphforest
