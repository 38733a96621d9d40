#include <benchmark/benchmark.h>

#include "ovmm/perception/detector.hpp"
#include "ovmm/perception/fusion.hpp"
#include "ovmm/world/render.hpp"
#include "ovmm/world/scene.hpp"

namespace {

using namespace ovmm;

struct Inputs {
  world::Frame frame;
  perception::TaskClasses task;
};

Inputs rendered_inputs() {
  const auto scene = world::generate_scene(3, world::default_scene_spec());
  world::AgentState agent;
  agent.base = {0.6, 0.6, 0.8};
  const auto& obj = scene.objects.front();
  return {world::render(scene, agent, world::CameraConfig{}), {obj.class_id, ClassId{10}, ClassId{12}}};
}

void BM_Detect(benchmark::State& state) {
  const auto in = rendered_inputs();
  const auto profile = perception::openvocab_profile();
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(perception::detect(in.frame, profile, rng));
}
BENCHMARK(BM_Detect);

void BM_Fuse(benchmark::State& state) {
  const auto in = rendered_inputs();
  Rng rng(1);
  const auto ts = perception::compose_priority(perception::detect(in.frame, perception::taskspec_profile(), rng), in.task);
  const auto ov = perception::detect(in.frame, perception::openvocab_profile(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(perception::fuse(ts, ov, in.task));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ts.size()));
}
BENCHMARK(BM_Fuse);

}  // namespace
