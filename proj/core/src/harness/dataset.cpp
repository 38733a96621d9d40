#include "ovmm/harness/dataset.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ovmm/common/rng.hpp"
#include "ovmm/harness/config.hpp"

namespace ovmm::harness {

using nlohmann::json;

namespace {

constexpr int kSceneAttempts = 16;
constexpr double kStartClearance = 0.3;

json spec_to_json(const world::SceneSpec& s) {
  return json{{"width", s.width},
              {"depth", s.depth},
              {"interior_walls", s.interior_walls},
              {"door_width", s.door_width},
              {"min_receptacles", s.min_receptacles},
              {"max_receptacles", s.max_receptacles},
              {"min_objects", s.min_objects},
              {"max_objects", s.max_objects},
              {"clearance", s.clearance},
              {"max_retries", s.max_retries}};
}

world::SceneSpec spec_from_json(const json& j) {
  world::SceneSpec s = world::default_scene_spec();
  s.width = j.value("width", s.width);
  s.depth = j.value("depth", s.depth);
  s.interior_walls = j.value("interior_walls", s.interior_walls);
  s.door_width = j.value("door_width", s.door_width);
  s.min_receptacles = j.value("min_receptacles", s.min_receptacles);
  s.max_receptacles = j.value("max_receptacles", s.max_receptacles);
  s.min_objects = j.value("min_objects", s.min_objects);
  s.max_objects = j.value("max_objects", s.max_objects);
  s.clearance = j.value("clearance", s.clearance);
  s.max_retries = j.value("max_retries", s.max_retries);
  return s;
}

std::optional<task::Episode> sample_episode(int id, std::uint64_t scene_seed, const world::Scene& scene,
                                            Rng& rng) {
  const auto& obj = scene.objects[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<int>(scene.objects.size()) - 1))];
  const auto* start = scene.find_receptacle(obj.resting_on.receptacle_id);
  if (start == nullptr) return std::nullopt;

  std::vector<ClassId> goal_classes;
  for (const auto& r : scene.receptacles) {
    if (r.class_id != start->class_id &&
        std::find(goal_classes.begin(), goal_classes.end(), r.class_id) == goal_classes.end()) {
      goal_classes.push_back(r.class_id);
    }
  }
  if (goal_classes.empty()) return std::nullopt;
  const ClassId goal = goal_classes[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<int>(goal_classes.size()) - 1))];

  for (int attempt = 0; attempt < 500; ++attempt) {
    const Vec2 p{rng.uniform(scene.bounds.min_x, scene.bounds.max_x),
                 rng.uniform(scene.bounds.min_y, scene.bounds.max_y)};
    if (!world::is_free(scene, p, kStartClearance)) continue;
    task::Episode ep;
    ep.id = id;
    ep.scene_seed = scene_seed;
    ep.prompt = {obj.class_id, start->class_id, goal};
    ep.agent_start = {p.x, p.y, rng.uniform(-kPi, kPi)};
    return ep;
  }
  return std::nullopt;
}

}  // namespace

Dataset generate_dataset(int n, std::uint64_t seed, const world::SceneSpec& spec) {
  if (n < 0) throw ConfigError("episode count must be >= 0");
  Dataset ds;
  ds.seed = seed;
  ds.scene_spec = spec;
  Rng rng(seed);
  for (int id = 0; id < n; ++id) {
    std::optional<task::Episode> ep;
    for (int attempt = 0; attempt < kSceneAttempts && !ep; ++attempt) {
      const std::uint64_t scene_seed = rng.next();
      try {
        const world::Scene scene = world::generate_scene(scene_seed, spec);
        ep = sample_episode(id, scene_seed, scene, rng);
      } catch (const world::PlacementInfeasible&) {
      }
    }
    if (!ep) throw ConfigError("scene spec is too crowded: no feasible scene for episode " + std::to_string(id));
    ds.episodes.push_back(*ep);
  }
  return ds;
}

std::string serialize_dataset(const Dataset& ds) {
  std::ostringstream out;
  out << json{{"format", "ovmm-dataset"},
              {"version", 1},
              {"seed", ds.seed},
              {"episodes", ds.episodes.size()},
              {"scene_spec", spec_to_json(ds.scene_spec)}}
             .dump()
      << '\n';
  for (const auto& ep : ds.episodes) {
    out << json{{"id", ep.id},
                {"scene_seed", ep.scene_seed},
                {"goal_object", ep.prompt.goal_object.value},
                {"start_receptacle", ep.prompt.start_receptacle.value},
                {"goal_receptacle", ep.prompt.goal_receptacle.value},
                {"agent_start", {ep.agent_start.x, ep.agent_start.y, ep.agent_start.theta}},
                {"step_budget", ep.step_budget}}
               .dump()
        << '\n';
  }
  return out.str();
}

Dataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Dataset ds;
  std::size_t declared = 0;
  bool have_header = false;
  int lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (!have_header) {
        if (j.value("format", "") != "ovmm-dataset" || j.value("version", 0) != 1) {
          throw IoError("dataset header missing or unsupported");
        }
        ds.seed = j.at("seed").get<std::uint64_t>();
        declared = j.at("episodes").get<std::size_t>();
        ds.scene_spec = spec_from_json(j.value("scene_spec", json::object()));
        have_header = true;
        continue;
      }
      task::Episode ep;
      ep.id = j.at("id").get<int>();
      ep.scene_seed = j.at("scene_seed").get<std::uint64_t>();
      ep.prompt.goal_object = ClassId{j.at("goal_object").get<std::uint8_t>()};
      ep.prompt.start_receptacle = ClassId{j.at("start_receptacle").get<std::uint8_t>()};
      ep.prompt.goal_receptacle = ClassId{j.at("goal_receptacle").get<std::uint8_t>()};
      const auto& s = j.at("agent_start");
      ep.agent_start = {s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()};
      ep.step_budget = j.value("step_budget", ep.step_budget);
      ds.episodes.push_back(ep);
    }
  } catch (const json::exception& e) {
    throw IoError("malformed dataset at line " + std::to_string(lineno) + ": " + e.what());
  }
  if (!have_header) throw IoError("dataset is empty: missing header");
  if (declared != ds.episodes.size()) {
    throw IoError("dataset header declares " + std::to_string(declared) + " episodes, found " +
                  std::to_string(ds.episodes.size()));
  }
  return ds;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset " + path.string());
  out << serialize_dataset(ds);
  if (!out) throw IoError("write failed for " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read dataset " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

world::Scene instantiate_scene(const task::Episode& ep, const world::SceneSpec& spec) {
  return world::generate_scene(ep.scene_seed, spec);
}

}  // namespace ovmm::harness
