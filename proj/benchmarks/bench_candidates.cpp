#include <benchmark/benchmark.h>

#include "morphforest/candidates.hpp"
#include "morphforest/synth.hpp"

namespace {

void BM_GenCandidates(benchmark::State& state) {
  morphforest::GrammarSpec spec;
  spec.roots = 200;
  spec.words = 4000;
  spec.suffixes = {"s", "ing", "ed", "er", "ly", "ness"};
  const auto corpus = morphforest::generate(spec);
  const auto vocab = corpus.vocabulary();
  morphforest::ExtractionOptions ext;
  ext.max_per_side = static_cast<std::size_t>(state.range(0));
  auto affixes = morphforest::extract_affixes(vocab, ext);
  affixes.register_transforms(morphforest::LanguageProfile::english());
  morphforest::CandidateOptions opt;
  opt.compounds = true;
  for (auto _ : state) {
    std::size_t total = 0;
    for (const auto& e : vocab.entries()) {
      total += morphforest::gen_candidates(e.word, vocab, affixes, opt).size();
    }
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * vocab.size()));
}
BENCHMARK(BM_GenCandidates)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
