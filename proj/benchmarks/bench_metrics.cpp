#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "gpgrade/metrics.hpp"

namespace {

void BM_RocAuc(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  std::bernoulli_distribution pos(0.1);
  std::vector<double> scores(static_cast<std::size_t>(state.range(0)));
  std::vector<bool> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    labels[i] = pos(rng);
    scores[i] = z(rng) + (labels[i] ? 1.0 : 0.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(gpgrade::roc_auc(scores, labels));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->RangeMultiplier(10)->Range(1000, 100000);

}  // namespace

BENCHMARK_MAIN();
