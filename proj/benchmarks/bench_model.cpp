#include <benchmark/benchmark.h>

#include <random>

#include "morphforest/model.hpp"
#include "oracles.hpp"

namespace {

void BM_CeLossAndGrad(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto words = static_cast<std::size_t>(state.range(0));
  const auto problem = oracle::random_problem(rng, words, 2000);
  std::vector<double> theta(2000, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(morphforest::ce_loss_and_grad(problem, theta, 0.1));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * words));
}
BENCHMARK(BM_CeLossAndGrad)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
