#include <algorithm>
#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "gpgrade/gp.hpp"

namespace {

struct Problem {
  gpgrade::Matrix x;
  gpgrade::Vector y;
};

Problem make_problem(Eigen::Index n, Eigen::Index d) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  Problem p{gpgrade::Matrix(n, d), gpgrade::Vector(n)};
  for (Eigen::Index i = 0; i < p.x.size(); ++i) p.x.data()[i] = z(rng);
  for (Eigen::Index i = 0; i < n; ++i) p.y[i] = std::clamp(std::round(2.0 + p.x(i, 0)), 0.0, 4.0);
  return p;
}

void BM_LogMarginalLikelihood(benchmark::State& state) {
  const auto p = make_problem(state.range(0), 32);
  const gpgrade::Hyperparams hp{1.5, 0.0, -1.0};
  for (auto _ : state) benchmark::DoNotOptimize(gpgrade::log_marginal_likelihood(p.x, p.y, hp));
}
BENCHMARK(BM_LogMarginalLikelihood)->RangeMultiplier(2)->Range(128, 2048)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const auto p = make_problem(state.range(0), 32);
  gpgrade::FitConfig cfg;
  cfg.restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(gpgrade::fit(p.x, p.y, cfg));
}
BENCHMARK(BM_Fit)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto p = make_problem(state.range(0), 32);
  const auto model = gpgrade::GPModel::condition(p.x, p.y, {1.5, 0.0, -1.0});
  const auto q = make_problem(1000, 32).x;
  for (auto _ : state) benchmark::DoNotOptimize(gpgrade::predict(model, q));
  state.SetItemsProcessed(state.iterations() * q.rows());
}
BENCHMARK(BM_Predict)->RangeMultiplier(4)->Range(128, 2048)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
