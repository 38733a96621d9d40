#include <benchmark/benchmark.h>

#include "ovmm/harness/dataset.hpp"
#include "ovmm/harness/simulation.hpp"

namespace {

using namespace ovmm;

void BM_Episode(benchmark::State& state) {
  const auto ds = harness::generate_dataset(8, 2024, world::default_scene_spec());
  harness::RunConfig cfg;
  cfg.perception = static_cast<harness::PerceptionMode>(state.range(0));
  std::size_t i = 0;
  std::int64_t steps = 0;
  for (auto _ : state) {
    const auto r = harness::run_episode(cfg, ds.scene_spec, ds.episodes[i++ % ds.episodes.size()]);
    steps += r.steps;
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
  state.SetLabel(harness::perception_mode_name(cfg.perception));
}
BENCHMARK(BM_Episode)
    ->Arg(static_cast<int>(harness::PerceptionMode::GroundTruth))
    ->Arg(static_cast<int>(harness::PerceptionMode::Fused))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
