#pragma once

// Helpers for running the pipeline on the bundled synthetic fixture.

#include <filesystem>
#include <string>

#include "morphforest/config.hpp"
#include "morphforest/io.hpp"
#include "morphforest/metrics.hpp"
#include "morphforest/pipeline.hpp"
#include "morphforest/synth.hpp"

namespace fixture {

inline std::filesystem::path dir() { return MORPHFOREST_FIXTURES_DIR; }

inline morphforest::GrammarSpec spec(std::uint64_t seed = 1) {
  auto s = morphforest::parse_spec(morphforest::io::read_file(dir() / "synthetic.spec"));
  s.seed = seed;
  return s;
}

inline morphforest::RunConfig config(std::uint64_t seed = 1) {
  auto c = morphforest::parse_config(morphforest::io::read_file(dir() / "synthetic.conf"));
  c.train.seed = seed;
  return c;
}

struct Run {
  morphforest::SynthCorpus corpus;
  morphforest::Vocabulary vocab;
  morphforest::AffixSet decoys;
  morphforest::TrainResult result;
};

inline Run train(const morphforest::SynthCorpus& corpus, const morphforest::RunConfig& cfg) {
  Run run{corpus, corpus.vocabulary(), morphforest::parse_affixes(corpus.decoys_tsv()), {}};
  const morphforest::WordVectors vectors;
  run.result = morphforest::train(run.vocab, vectors, cfg.train, run.decoys);
  return run;
}

inline morphforest::Decoder decoder(const Run& run) {
  return morphforest::Decoder(run.result.forest);
}

// Boundary F1 of the trained forest against the generator's segmentations.
inline morphforest::BprResult score(const Run& run) {
  const auto dec = decoder(run);
  morphforest::StringMap<morphforest::BoundarySet> pred;
  for (const auto& w : run.result.forest.words()) {
    const auto seg = dec.segment(w);
    pred[w] = morphforest::BoundarySet(seg.boundaries.begin(), seg.boundaries.end());
  }
  return morphforest::bpr(pred, morphforest::parse_gold_segmentations(run.corpus.gold_segmentations_tsv()));
}

}  // namespace fixture
