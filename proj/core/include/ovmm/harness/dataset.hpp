#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ovmm/task/episode.hpp"
#include "ovmm/world/scene.hpp"

namespace ovmm::harness {

struct Dataset {
  std::uint64_t seed = 0;
  world::SceneSpec scene_spec;
  std::vector<task::Episode> episodes;
};

/// Samples n episodes. Each prompt names an object present in its scene, the
/// receptacle class it rests on, and a different receptacle class from the
/// same scene. Scene seeds whose layout cannot be placed are skipped.
Dataset generate_dataset(int n, std::uint64_t seed, const world::SceneSpec& spec);

/// JSON Lines: one header record, then one record per episode.
std::string serialize_dataset(const Dataset& ds);
Dataset parse_dataset(const std::string& text);

void write_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// Regenerates the episode's scene.
world::Scene instantiate_scene(const task::Episode& ep, const world::SceneSpec& spec);

}  // namespace ovmm::harness
