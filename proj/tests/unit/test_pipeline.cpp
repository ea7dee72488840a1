#include <doctest.h>

#include <cmath>
#include <random>

#include "fixture.hpp"
#include "morphforest/error.hpp"
#include "morphforest/pipeline.hpp"
#include "oracles.hpp"

using namespace morphforest;

namespace {

Edge stop(std::string w) { return Edge{std::move(w), DerivationType::kStop, {}, 0.0}; }

Edge edge(std::string parent, DerivationType t, std::vector<AffixId> ids = {},
          double lp = 0.0) {
  return Edge{std::move(parent), t, std::move(ids), lp};
}

std::string joined(const Segmentation& s) {
  std::string out;
  for (const auto& m : s.morphs) out += (out.empty() ? "" : "-") + m;
  return out;
}

// Non-stop derivations on a word's chain, compound parts included.
std::size_t derivations(const Decoder& dec, const std::string& w) {
  const Edge e = dec.edge(w);
  if (e.dtype == DerivationType::kStop) return 0;
  if (is_compound(e.dtype)) {
    const std::size_t n = w.size(), p = e.parent.size();
    const std::string other = e.dtype == DerivationType::kCompoundLeft ? w.substr(p) : w.substr(0, n - p);
    return 1 + derivations(dec, e.parent) + derivations(dec, other);
  }
  return 1 + derivations(dec, e.parent);
}

}  // namespace

TEST_CASE("forest bookkeeping") {
  Forest f;
  AffixSet set;
  const auto s = set.add(AffixSide::kSuffix, "s", 1);
  f.add("paint", stop("paint"));
  f.add("paints", edge("paint", DerivationType::kSuffix, {s}, std::log(0.5)));
  f.add("pain", stop("pain"));
  CHECK(f.size() == 3);
  CHECK(f.tree_count() == 2);
  CHECK(f.used_affixes() == std::vector<AffixId>{s});
  CHECK(f.find("paints")->parent == "paint");
  CHECK(f.find("nope") == nullptr);
  CHECK_THROWS_AS(f.add("pain", stop("pain")), Error);
  CHECK_THROWS_AS(f.add("abc", edge("abcd", DerivationType::kSuffix)), Error);
  CHECK_THROWS_AS(f.add("abc", edge("abc", DerivationType::kSuffix)), Error);

  const auto text = serialize_forest(f, set);
  CHECK(text.find("paints\tpaint\tSUFFIX\tsuf:s\t") != std::string::npos);
  CHECK(text.find("pain\tpain\tSTOP\t-\t") != std::string::npos);
  CHECK(serialize_forest(parse_forest(text, set), set) == text);
  CHECK_THROWS_AS(parse_forest("a\ta\tSTOP\n", set), ParseError);
  CHECK_THROWS_AS(parse_forest("ab\ta\tSUFFIX\tsuf:zz\t0\n", set), Error);
}

TEST_CASE("forest score") {
  Forest f;
  f.add("a", edge("a", DerivationType::kStop, {}, std::log(0.5)));
  f.add("b", edge("b", DerivationType::kStop, {}, std::log(0.5)));
  CHECK(score_forest(f, 0.3, 0.7) == doctest::Approx(std::log(2.0) + 0.7));
  CHECK(score_forest(f, 0.0, 0.0) == doctest::Approx(std::log(2.0)));

  AffixSet set;
  const auto s = set.add(AffixSide::kSuffix, "s", 1);
  Forest g;
  g.add("walk", edge("walk", DerivationType::kStop, {}, std::log(0.9)));
  g.add("walks", edge("walk", DerivationType::kSuffix, {s}, std::log(0.6)));
  const double expected = -(std::log(0.9) + std::log(0.6)) / 2 + 0.1 * 1 + 0.4 * 1.0 / 2;
  CHECK(score_forest(g, 0.1, 0.4) == doctest::Approx(expected));
}

TEST_CASE("forest score equals the ILP objective of the solved program") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = oracle::random_instance(rng, 30, 6);
    inst.alpha = 0.01;
    inst.beta = 0.6;
    const auto sol = solve_exact(inst);
    Forest f;
    for (std::size_t i = 0; i < inst.words.size(); ++i) {
      const auto& c = inst.words[i].candidates[sol.choice[i]];
      std::vector<AffixId> ids;
      for (auto k : c.affixes) ids.push_back(AffixId{k});
      // parents only need to be shorter for the score
      const std::string w = "word" + std::to_string(i);
      f.add(w, sol.choice[i] == 0 ? edge(w, DerivationType::kStop, {}, c.log_prob)
                               : edge("w", DerivationType::kSuffix, ids, c.log_prob));
    }
    CHECK(score_forest(f, inst.alpha, inst.beta) == doctest::Approx(sol.objective).epsilon(1e-12));
  }
}

TEST_CASE("decoding examples") {
  AffixSet set;
  const auto ence = set.add(AffixSide::kSuffix, "ence", 1);
  const auto s = set.add(AffixSide::kSuffix, "s", 1);
  const auto er = set.add(AffixSide::kSuffix, "er", 1);
  const auto ing = set.add(AffixSide::kSuffix, "ing", 1);
  const auto ed = set.add(AffixSide::kSuffix, "ed", 1);
  set.register_transforms(LanguageProfile::english());
  const auto del = *set.find(AffixSide::kTransform, "del:e");
  const auto rep = *set.find(AffixSide::kTransform, "rep");
  const auto mod = *set.find(AffixSide::kTransform, "mod:i>y");

  Forest f;
  f.add("divergence", edge("diverg", DerivationType::kSuffix, {ence}));
  f.add("gaslights", edge("gaslight", DerivationType::kSuffix, {s}));
  f.add("gaslight", edge("light", DerivationType::kCompoundRight));
  f.add("gas", stop("gas"));
  f.add("light", stop("light"));
  f.add("knuckle", stop("knuckle"));
  f.add("painter", edge("paint", DerivationType::kSuffix, {er}));
  f.add("paint", stop("paint"));
  f.add("taking", edge("take", DerivationType::kDelete, {ing, del}));
  f.add("take", stop("take"));
  f.add("stopping", edge("stop", DerivationType::kRepeat, {ing, rep}));
  f.add("stop", stop("stop"));
  f.add("carried", edge("carry", DerivationType::kModify, {ed, mod}));
  f.add("carry", stop("carry"));
  f.add("unseen", edge("seen", DerivationType::kPrefix));
  f.add("seen", stop("seen"));
  const Decoder dec(f);

  CHECK(joined(dec.segment("divergence")) == "diverg-ence");
  CHECK(joined(dec.segment("gaslights")) == "gas-light-s");
  CHECK(joined(dec.segment("gaslights", false)) == "gaslight-s");
  CHECK(dec.segment("gaslights").boundaries == std::vector<std::size_t>{3, 8});
  CHECK(joined(dec.segment("knuckle")) == "knuckle");
  CHECK(dec.segment("knuckle").boundaries.empty());
  CHECK(joined(dec.segment("taking")) == "tak-ing");
  CHECK(joined(dec.segment("stopping")) == "stop-ping");
  CHECK(joined(dec.segment("carried")) == "carri-ed");
  CHECK(joined(dec.segment("unseen")) == "un-seen");

  CHECK(dec.root_of("painter") == "paint");
  CHECK(dec.root_of("taking") == "take");
  CHECK(dec.root_of("knuckle") == "knuckle");
  CHECK(dec.root_of("gaslights") == "light");
  CHECK(dec.root_of("divergence") == "diverg");
  // strings outside the forest stop without a model
  CHECK(dec.root_of("zzz") == "zzz");
}

TEST_CASE("families") {
  Forest f;
  AffixSet set;
  const auto s = set.add(AffixSide::kSuffix, "s", 1);
  const auto t = set.add(AffixSide::kSuffix, "t", 1);
  f.add("paints", edge("paint", DerivationType::kSuffix, {s}));
  f.add("paint", stop("paint"));
  f.add("pain", stop("pain"));
  auto fams = Decoder(f).families();
  REQUIRE(fams.size() == 2);
  CHECK(fams[0].root == "pain");
  CHECK(fams[0].members == std::vector<std::string>{"pain"});
  CHECK(fams[1].root == "paint");
  CHECK(fams[1].members == std::vector<std::string>{"paints", "paint"});

  Forest merged;
  merged.add("paints", edge("paint", DerivationType::kSuffix, {s}));
  merged.add("paint", edge("pain", DerivationType::kSuffix, {t}));
  merged.add("pain", stop("pain"));
  fams = Decoder(merged).families();
  REQUIRE(fams.size() == 1);
  CHECK(fams[0].members.size() == 3);

  Forest singles;
  for (const char* w : {"x", "y", "z"}) singles.add(w, stop(w));
  CHECK(Decoder(singles).families().size() == 3);

  // out-of-vocabulary parents key a family without joining it
  Forest oov;
  oov.add("walks", edge("walk", DerivationType::kSuffix, {s}));
  fams = Decoder(oov).families();
  REQUIRE(fams.size() == 1);
  CHECK(fams[0].root == "walk");
  CHECK(fams[0].members == std::vector<std::string>{"walks"});

  CHECK(sibling_table_from_forest(f).at("paint") == 1);
}

TEST_CASE("training on the synthetic fixture") {
  const auto corpus = generate(fixture::spec(1));
  const auto cfg = fixture::config(1);
  const auto run = fixture::train(corpus, cfg);
  const auto& r = run.result;
  const auto dec = fixture::decoder(run);

  REQUIRE(!r.rounds.empty());
  CHECK(r.rounds.size() <= cfg.train.rounds);
  for (std::size_t i = 0; i < r.rounds.size(); ++i) {
    CHECK(r.rounds[i].live_affixes <= r.rounds[i].live_affixes_before);
    if (i > 0) CHECK(r.rounds[i].live_affixes_before == r.rounds[i - 1].live_affixes);
    CHECK(r.rounds[i].losses.size() == cfg.train.adam.iters + 1);
    CHECK(r.rounds[i].proof.has_value());
  }
  CHECK(r.affixes.live_count() == r.rounds.back().live_affixes);

  // one edge per vocabulary word, trees = stop edges
  CHECK(r.forest.size() == run.vocab.size());
  for (const auto& e : run.vocab.entries()) CHECK(r.forest.find(e.word) != nullptr);
  std::size_t stops = 0;
  for (const auto& e : r.forest.edges()) {
    stops += e.dtype == DerivationType::kStop;
    for (auto id : e.affix_ids) CHECK(r.affixes.is_live(id));
  }
  CHECK(stops == r.forest.tree_count());

  // decoding consistency
  std::size_t members = 0;
  for (const auto& fam : dec.families()) {
    members += fam.members.size();
    for (const auto& w : fam.members) CHECK(dec.root_of(w) == fam.root);
  }
  CHECK(members == run.vocab.size());
  for (const auto& w : r.forest.words()) {
    const auto seg = dec.segment(w);
    std::string cat;
    for (const auto& m : seg.morphs) cat += m;
    CHECK(cat == w);
    CHECK(seg.boundaries.size() == derivations(dec, w));
  }

  // the chosen edge of each word is one of its current candidates
  CandidateOptions copt = cfg.train.candidates;
  for (std::size_t i = 0; i < r.forest.size(); ++i) {
    const auto& w = r.forest.words()[i];
    const auto& e = r.forest.edges()[i];
    bool found = false;
    for (const auto& c : gen_candidates(w, run.vocab, r.affixes, copt)) {
      found = found || (c.parent == (e.dtype == DerivationType::kStop ? w : e.parent) && c.dtype == e.dtype);
    }
    CHECK(found);
  }

  CHECK(fixture::score(run).prf.f1 >= 0.95);

  // the late half of each loss curve does not climb
  for (const auto& round : r.rounds) {
    const auto& L = round.losses;
    for (std::size_t i = L.size() / 2 + 1; i < L.size(); ++i) CHECK(L[i] <= L[i - 1] + 1e-6);
  }

  SUBCASE("a second run is byte-identical") {
    const auto again = fixture::train(corpus, cfg);
    CHECK(serialize_forest(again.result.forest, again.result.affixes) ==
          serialize_forest(r.forest, r.affixes));
    CHECK(serialize_weights(again.result.weights) == serialize_weights(r.weights));
  }
}

TEST_CASE("ILP off runs one round of local argmax") {
  const auto corpus = generate(fixture::spec(2));
  auto cfg = fixture::config(2);
  cfg.train.ilp.mode = IlpMode::kOff;
  const auto run = fixture::train(corpus, cfg);
  REQUIRE(run.result.rounds.size() == 1);
  CHECK_FALSE(run.result.rounds[0].proof.has_value());
  CHECK(run.result.rounds[0].rejected == 0);
}

TEST_CASE("edge model decodes unseen words") {
  const auto corpus = generate(fixture::spec(3));
  const auto cfg = fixture::config(3);
  const auto run = fixture::train(corpus, cfg);
  const WordVectors vectors;
  const EdgeModel model(run.vocab, vectors, run.result.affixes, run.result.siblings,
                        run.result.weights, cfg.train);
  const Decoder dec(run.result.forest, &model);

  // a known root with a fresh suffix stack
  const std::string root = corpus.roots.front();
  std::string unseen = root + "lar";
  while (run.vocab.count(unseen) != 0) unseen += "ka";
  REQUIRE(run.vocab.count(unseen) == 0);
  const auto cands = model.scored_candidates(unseen);
  REQUIRE(!cands.empty());
  CHECK(cands[0].dtype == DerivationType::kStop);
  double total = 0.0;
  for (const auto& c : cands) total += std::exp(c.log_prob);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  const auto seg = dec.segment(unseen);
  std::string cat;
  for (const auto& m : seg.morphs) cat += m;
  CHECK(cat == unseen);
  CHECK(dec.root_of(unseen).size() < unseen.size());
}

TEST_CASE("training requires words") {
  const Vocabulary empty;
  const WordVectors vectors;
  try {
    train(empty, vectors, TrainConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptyVocabulary);
  }
}
