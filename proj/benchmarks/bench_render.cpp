#include <benchmark/benchmark.h>

#include "ovmm/world/render.hpp"
#include "ovmm/world/scene.hpp"

namespace {

using namespace ovmm;

void BM_Render(benchmark::State& state) {
  const auto scene = world::generate_scene(7, world::default_scene_spec());
  world::CameraConfig cam;
  cam.width = static_cast<int>(state.range(0));
  cam.height = cam.width / 2;
  world::AgentState agent;
  agent.base = {0.6, 0.6, 0.8};
  for (auto _ : state) {
    agent.base.theta += 0.1;
    benchmark::DoNotOptimize(world::render(scene, agent, cam));
  }
  state.SetItemsProcessed(state.iterations() * cam.width * cam.height);
}
BENCHMARK(BM_Render)->Arg(64)->Arg(128)->Arg(256);

void BM_SceneGeneration(benchmark::State& state) {
  const auto spec = world::default_scene_spec();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(world::generate_scene(++seed, spec));
}
BENCHMARK(BM_SceneGeneration);

}  // namespace
