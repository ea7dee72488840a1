#include <benchmark/benchmark.h>

#include <random>

#include "morphforest/ilp.hpp"
#include "oracles.hpp"

namespace {

morphforest::IlpInstance instance(std::size_t words, std::size_t affixes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto inst = oracle::random_instance(rng, words, affixes, 6);
  inst.alpha = 1e-3;
  inst.beta = 0.5;
  return inst;
}

void BM_SolveExact(benchmark::State& state) {
  const auto inst = instance(static_cast<std::size_t>(state.range(0)),
                             static_cast<std::size_t>(state.range(1)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(morphforest::solve_exact(inst));
}
BENCHMARK(BM_SolveExact)->Args({100, 12})->Args({1000, 16})->Args({5000, 24})
    ->Unit(benchmark::kMillisecond);

void BM_SolveGreedy(benchmark::State& state) {
  const auto inst = instance(static_cast<std::size_t>(state.range(0)),
                             static_cast<std::size_t>(state.range(1)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(morphforest::solve_greedy(inst));
}
BENCHMARK(BM_SolveGreedy)->Args({1000, 50})->Args({10000, 500})->Unit(benchmark::kMillisecond);

}  // namespace
