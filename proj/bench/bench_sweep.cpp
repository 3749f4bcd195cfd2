#include <benchmark/benchmark.h>

#include "pdcv/harness.hpp"

namespace {

pdcv::ExperimentConfig bench_config() {
  auto cfg = pdcv::ExperimentConfig::defaults(pdcv::Experiment::GridworldOffpolicy);
  cfg.algorithms = {{pdcv::Variant::ExpectedSarsa, 1, -1.0}, {pdcv::Variant::CvSarsa, 4, -1.0}};
  cfg.alpha_grid = {0.2, 0.6};
  cfg.runs = 16;
  cfg.episodes = 50;
  return cfg;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto cfg = bench_config();
  for (auto _ : state) benchmark::DoNotOptimize(pdcv::run_sweep_serial(cfg));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);

void BM_SweepParallel(benchmark::State& state) {
  const auto cfg = bench_config();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pdcv::run_sweep(cfg, workers));
}
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
