#include <benchmark/benchmark.h>

#include "farsim/baselines.hpp"
#include "farsim/metrics.hpp"
#include "farsim/solver.hpp"

namespace {

farsim::SystemConfig default_config() { return farsim::SystemConfig{}; }

void BM_SampleRealization(benchmark::State& state) {
  farsim::SystemConfig config = default_config();
  std::uint64_t trial = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(farsim::sample_realization(config, {1, trial++}));
  }
}
BENCHMARK(BM_SampleRealization);

void BM_Assemble(benchmark::State& state) {
  farsim::SystemConfig config = default_config();
  farsim::ChannelRealization realization =
      farsim::sample_realization(config, {1, 0});
  farsim::Layout layout = farsim::initial_layout(config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(farsim::assemble(realization, layout, config));
  }
}
BENCHMARK(BM_Assemble);

void BM_RateReport(benchmark::State& state) {
  farsim::SystemConfig config = default_config();
  farsim::ChannelRealization realization =
      farsim::sample_realization(config, {1, 0});
  farsim::EffectiveChannel channel =
      farsim::assemble(realization, farsim::initial_layout(config), config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(farsim::rate_report(channel, config));
  }
}
BENCHMARK(BM_RateReport);

void BM_BuildSubproblemFarRx(benchmark::State& state) {
  farsim::SystemConfig config = default_config();
  farsim::ChannelRealization realization =
      farsim::sample_realization(config, {1, 0});
  farsim::Layout layout = farsim::initial_layout(config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        farsim::build_subproblem_far_rx(realization, layout, config, 0, 1, 0.5));
  }
}
BENCHMARK(BM_BuildSubproblemFarRx);

void BM_QpSolve2d(benchmark::State& state) {
  farsim::SystemConfig config = default_config();
  farsim::ChannelRealization realization =
      farsim::sample_realization(config, {1, 0});
  farsim::Layout layout = farsim::initial_layout(config);
  farsim::SubproblemSpec spec =
      farsim::build_subproblem_far_rx(realization, layout, config, 0, 1, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(farsim::qp_solve_2d(spec));
  }
}
BENCHMARK(BM_QpSolve2d);

void BM_InnerPasses(benchmark::State& state) {
  farsim::SystemConfig config = default_config();
  config.solver.max_passes = static_cast<int>(state.range(0));
  farsim::ChannelRealization realization =
      farsim::sample_realization(config, {1, 0});
  farsim::Layout layout = farsim::initial_layout(config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        farsim::alternating_optimize(realization, layout, config, 0, 0.0));
  }
}
BENCHMARK(BM_InnerPasses)->Arg(1)->Arg(10)->Arg(30);

void BM_MaxMinDefault(benchmark::State& state) {
  farsim::SystemConfig config = default_config();
  farsim::Layout layout = farsim::initial_layout(config);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    farsim::ChannelRealization realization =
        farsim::sample_realization(config, {2, trial++});
    benchmark::DoNotOptimize(
        farsim::max_min_optimize(realization, layout, config));
  }
}
BENCHMARK(BM_MaxMinDefault)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
