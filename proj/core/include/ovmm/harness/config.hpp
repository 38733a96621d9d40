#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "ovmm/agent/fsm.hpp"
#include "ovmm/perception/detector.hpp"
#include "ovmm/rewards/rewards.hpp"
#include "ovmm/world/render.hpp"
#include "ovmm/world/scene.hpp"
#include "ovmm/world/world.hpp"

namespace ovmm::harness {

/// Malformed or inconsistent configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or unreadable files; maps to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed `[section]` / `key = value` text. Values are numbers, booleans or
/// double-quoted strings; `#` starts a comment.
class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return values_; }

 private:
  const std::string* raw(const std::string& section, const std::string& key) const;
  std::map<std::string, std::map<std::string, std::string>> values_;
};

enum class PerceptionMode { GroundTruth, TaskSpec, OpenVocab, Fused };
enum class SkillMode { Scripted, Replay };

std::string perception_mode_name(PerceptionMode m);

struct RunConfig {
  std::filesystem::path dataset_path;
  world::CameraConfig camera;
  world::WorldConfig world;
  rewards::RewardConfig reward;
  PerceptionMode perception = PerceptionMode::Fused;
  perception::DetectorProfile taskspec = perception::taskspec_profile();
  perception::DetectorProfile openvocab = perception::openvocab_profile();
  agent::AgentConfig agent;
  SkillMode skills = SkillMode::Scripted;
  std::filesystem::path replay_file;
  std::uint64_t master_seed = 0;
  int workers = 1;
  std::filesystem::path output_dir;
  bool trace = false;
};

/// Applies a config document on top of the defaults. Unknown sections or keys
/// are rejected.
RunConfig run_config_from(const ConfigDocument& doc);

/// Reads the `[scene]` section over default_scene_spec().
world::SceneSpec scene_spec_from(const ConfigDocument& doc);

/// Checks the invariants that must hold before any episode runs.
void validate(const RunConfig& cfg);

}  // namespace ovmm::harness
