#include <random>

#include <benchmark/benchmark.h>

#include "gpgrade/cholesky.hpp"
#include "gpgrade/kernel.hpp"

namespace {

gpgrade::Matrix random_inputs(Eigen::Index n, Eigen::Index d) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> z;
  gpgrade::Matrix x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
  return x;
}

void BM_KernelMatrix(benchmark::State& state) {
  const auto x = random_inputs(state.range(0), 64);
  const gpgrade::Hyperparams hp{1.0, 0.0, -2.0};
  for (auto _ : state) benchmark::DoNotOptimize(gpgrade::kernel_matrix(x, hp));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KernelMatrix)->RangeMultiplier(2)->Range(128, 2048)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

void BM_Cholesky(benchmark::State& state) {
  const auto x = random_inputs(state.range(0), 16);
  gpgrade::SquareMatrix k = gpgrade::kernel_matrix(x, {1.0, 0.0, -2.0});
  k.diagonal().array() += 0.1;
  gpgrade::SquareMatrix lower;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gpgrade::cholesky_in_place(k, lower));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Cholesky)->RangeMultiplier(2)->Range(128, 2048)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);

}  // namespace

BENCHMARK_MAIN();
