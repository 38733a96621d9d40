#include "ovmm/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace ovmm::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      doc.values_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated string");
      }
    }
    auto& sec = doc.values_[section];
    if (sec.count(key) != 0) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    sec[key] = value;
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const std::string* ConfigDocument::raw(const std::string& section, const std::string& key) const {
  auto s = values_.find(section);
  if (s == values_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

bool ConfigDocument::has(const std::string& section, const std::string& key) const {
  return raw(section, key) != nullptr;
}

double ConfigDocument::get_double(const std::string& section, const std::string& key, double fallback) const {
  const std::string* v = raw(section, key);
  if (v == nullptr) return fallback;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size()) {
    throw ConfigError("[" + section + "] " + key + ": expected a number, got '" + *v + "'");
  }
  return out;
}

int ConfigDocument::get_int(const std::string& section, const std::string& key, int fallback) const {
  const std::string* v = raw(section, key);
  if (v == nullptr) return fallback;
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size()) {
    throw ConfigError("[" + section + "] " + key + ": expected an integer, got '" + *v + "'");
  }
  return out;
}

bool ConfigDocument::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const std::string* v = raw(section, key);
  if (v == nullptr) return fallback;
  if (*v == "true") return true;
  if (*v == "false") return false;
  throw ConfigError("[" + section + "] " + key + ": expected true or false, got '" + *v + "'");
}

std::string ConfigDocument::get_string(const std::string& section, const std::string& key,
                                       const std::string& fallback) const {
  const std::string* v = raw(section, key);
  if (v == nullptr) return fallback;
  if (v->size() < 2 || v->front() != '"') {
    throw ConfigError("[" + section + "] " + key + ": expected a quoted string");
  }
  return v->substr(1, v->size() - 2);
}

std::string perception_mode_name(PerceptionMode m) {
  switch (m) {
    case PerceptionMode::GroundTruth: return "ground_truth";
    case PerceptionMode::TaskSpec: return "taskspec";
    case PerceptionMode::OpenVocab: return "openvocab";
    case PerceptionMode::Fused: return "fused";
  }
  return "unknown";
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::set<std::string> detector = {"default_recall", "object_recall", "furniture_recall",
                                                 "erosion", "false_positive_rate", "min_mask_px"};
  static const std::map<std::string, std::set<std::string>> keys = {
      {"scene",
       {"width", "depth", "interior_walls", "door_width", "min_receptacles", "max_receptacles",
        "min_objects", "max_objects", "clearance", "max_retries"}},
      {"camera",
       {"width", "height", "hfov_deg", "elevation_top_deg", "elevation_bottom_deg", "mount_height",
        "max_range", "depth_quantum", "occlusion_onset", "max_blocked_fraction"}},
      {"world",
       {"forward_step", "turn_deg", "snap_range", "snap_cone_deg", "snap_failure_prob", "v_stable",
        "k_stable", "impact_gain", "damping", "settle_steps"}},
      {"reward",
       {"contact_bonus", "contact_per_step", "distance_total", "d_min", "view_total", "view_cap",
        "camera_block_penalty", "wander_penalty", "wander_radius", "block_fraction_threshold",
        "contact_step_cap"}},
      {"perception", {"mode"}},
      {"detector.taskspec", detector},
      {"detector.openvocab", detector},
      {"agent", {"skills", "replay_file", "retry_loop", "skill_budget", "global_budget"}},
      {"run", {"seed", "workers"}},
  };
  return keys;
}

void check_known(const ConfigDocument& doc) {
  for (const auto& [section, entries] : doc.sections()) {
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : entries) {
      const bool per_class = section.rfind("detector.", 0) == 0 && key.rfind("recall_", 0) == 0;
      if (!per_class && it->second.count(key) == 0) {
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
    }
  }
}

void apply_detector(const ConfigDocument& doc, const std::string& section,
                    perception::DetectorProfile& p) {
  const auto spec = world::default_scene_spec();
  if (doc.has(section, "default_recall")) p.default_recall = doc.get_double(section, "default_recall", 0.0);
  if (doc.has(section, "furniture_recall")) {
    for (const auto& r : spec.receptacle_classes) p.recall_by_class[r.id] = doc.get_double(section, "furniture_recall", 0.0);
  }
  if (doc.has(section, "object_recall")) {
    for (const auto& o : spec.object_classes) p.recall_by_class[o.id] = doc.get_double(section, "object_recall", 0.0);
  }
  p.mask_erosion_px = doc.get_int(section, "erosion", p.mask_erosion_px);
  p.false_positive_rate = doc.get_double(section, "false_positive_rate", p.false_positive_rate);
  p.min_mask_px = doc.get_int(section, "min_mask_px", p.min_mask_px);
  auto it = doc.sections().find(section);
  if (it == doc.sections().end()) return;
  for (const auto& [key, value] : it->second) {
    if (key.rfind("recall_", 0) != 0) continue;
    int id = 0;
    const std::string digits = key.substr(7);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || id < 0 || id > 255) {
      throw ConfigError("[" + section + "] " + key + ": expected recall_<class id>");
    }
    p.recall_by_class[ClassId{static_cast<std::uint8_t>(id)}] = doc.get_double(section, key, 0.0);
  }
}

}  // namespace

world::SceneSpec scene_spec_from(const ConfigDocument& doc) {
  check_known(doc);
  world::SceneSpec s = world::default_scene_spec();
  const std::string sec = "scene";
  s.width = doc.get_double(sec, "width", s.width);
  s.depth = doc.get_double(sec, "depth", s.depth);
  s.interior_walls = doc.get_int(sec, "interior_walls", s.interior_walls);
  s.door_width = doc.get_double(sec, "door_width", s.door_width);
  s.min_receptacles = doc.get_int(sec, "min_receptacles", s.min_receptacles);
  s.max_receptacles = doc.get_int(sec, "max_receptacles", s.max_receptacles);
  s.min_objects = doc.get_int(sec, "min_objects", s.min_objects);
  s.max_objects = doc.get_int(sec, "max_objects", s.max_objects);
  s.clearance = doc.get_double(sec, "clearance", s.clearance);
  s.max_retries = doc.get_int(sec, "max_retries", s.max_retries);
  if (s.width <= 0.0 || s.depth <= 0.0) throw ConfigError("[scene] width and depth must be positive");
  if (s.min_receptacles < 2 || s.max_receptacles < s.min_receptacles) {
    throw ConfigError("[scene] need 2 <= min_receptacles <= max_receptacles");
  }
  if (s.min_objects < 1 || s.max_objects < s.min_objects) {
    throw ConfigError("[scene] need 1 <= min_objects <= max_objects");
  }
  return s;
}

RunConfig run_config_from(const ConfigDocument& doc) {
  check_known(doc);
  RunConfig c;

  auto& cam = c.camera;
  cam.width = doc.get_int("camera", "width", cam.width);
  cam.height = doc.get_int("camera", "height", cam.height);
  cam.hfov = deg_to_rad(doc.get_double("camera", "hfov_deg", rad_to_deg(cam.hfov)));
  cam.elevation_top = deg_to_rad(doc.get_double("camera", "elevation_top_deg", rad_to_deg(cam.elevation_top)));
  cam.elevation_bottom =
      deg_to_rad(doc.get_double("camera", "elevation_bottom_deg", rad_to_deg(cam.elevation_bottom)));
  cam.mount_height = doc.get_double("camera", "mount_height", cam.mount_height);
  cam.max_range = doc.get_double("camera", "max_range", cam.max_range);
  cam.depth_quantum = doc.get_double("camera", "depth_quantum", cam.depth_quantum);
  cam.occlusion_onset = doc.get_double("camera", "occlusion_onset", cam.occlusion_onset);
  cam.max_blocked_fraction = doc.get_double("camera", "max_blocked_fraction", cam.max_blocked_fraction);

  auto& w = c.world;
  w.forward_step = doc.get_double("world", "forward_step", w.forward_step);
  w.turn_step = deg_to_rad(doc.get_double("world", "turn_deg", rad_to_deg(w.turn_step)));
  w.snap_range = doc.get_double("world", "snap_range", w.snap_range);
  w.snap_cone = deg_to_rad(doc.get_double("world", "snap_cone_deg", rad_to_deg(w.snap_cone)));
  w.snap_failure_prob = doc.get_double("world", "snap_failure_prob", w.snap_failure_prob);
  w.v_stable = doc.get_double("world", "v_stable", w.v_stable);
  w.k_stable = doc.get_int("world", "k_stable", w.k_stable);
  w.impact_gain = doc.get_double("world", "impact_gain", w.impact_gain);
  w.damping = doc.get_double("world", "damping", w.damping);
  w.settle_steps = doc.get_int("world", "settle_steps", w.settle_steps);
  cam.full_extension = w.max_arm_extension;

  auto& r = c.reward;
  r.contact_bonus = doc.get_double("reward", "contact_bonus", r.contact_bonus);
  r.contact_per_step = doc.get_double("reward", "contact_per_step", r.contact_per_step);
  r.distance_total = doc.get_double("reward", "distance_total", r.distance_total);
  r.d_min = doc.get_double("reward", "d_min", r.d_min);
  r.view_total = doc.get_double("reward", "view_total", r.view_total);
  r.view_cap = doc.get_double("reward", "view_cap", r.view_cap);
  r.camera_block_penalty = doc.get_double("reward", "camera_block_penalty", r.camera_block_penalty);
  r.wander_penalty = doc.get_double("reward", "wander_penalty", r.wander_penalty);
  r.wander_radius = doc.get_double("reward", "wander_radius", r.wander_radius);
  r.block_fraction_threshold = doc.get_double("reward", "block_fraction_threshold", r.block_fraction_threshold);
  r.contact_step_cap = doc.get_int("reward", "contact_step_cap", r.contact_step_cap);

  const std::string mode = doc.get_string("perception", "mode", "fused");
  if (mode == "ground_truth") {
    c.perception = PerceptionMode::GroundTruth;
  } else if (mode == "taskspec") {
    c.perception = PerceptionMode::TaskSpec;
  } else if (mode == "openvocab") {
    c.perception = PerceptionMode::OpenVocab;
  } else if (mode == "fused") {
    c.perception = PerceptionMode::Fused;
  } else {
    throw ConfigError("[perception] mode: unknown value '" + mode + "'");
  }
  apply_detector(doc, "detector.taskspec", c.taskspec);
  apply_detector(doc, "detector.openvocab", c.openvocab);

  const std::string skills = doc.get_string("agent", "skills", "scripted");
  if (skills == "scripted") {
    c.skills = SkillMode::Scripted;
  } else if (skills == "replay") {
    c.skills = SkillMode::Replay;
  } else {
    throw ConfigError("[agent] skills: unknown value '" + skills + "'");
  }
  c.replay_file = doc.get_string("agent", "replay_file", "");
  c.agent.retry_loop = doc.get_bool("agent", "retry_loop", c.agent.retry_loop);
  c.agent.skill_budget = doc.get_int("agent", "skill_budget", c.agent.skill_budget);
  c.agent.global_budget = doc.get_int("agent", "global_budget", c.agent.global_budget);

  c.master_seed = static_cast<std::uint64_t>(doc.get_int("run", "seed", 0));
  c.workers = doc.get_int("run", "workers", c.workers);
  return c;
}

void validate(const RunConfig& c) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (c.workers < 1) throw ConfigError("worker count must be at least 1");
  if (c.camera.width < 1 || c.camera.height < 1) throw ConfigError("[camera] frame must be at least 1x1");
  if (c.camera.width * c.camera.height > 4096 * 4096) throw ConfigError("[camera] frame too large");
  if (c.camera.max_range <= 0.0) throw ConfigError("[camera] max_range must be positive");
  if (!prob(c.world.snap_failure_prob)) throw ConfigError("[world] snap_failure_prob must be in [0,1]");
  if (c.world.k_stable < 1 || c.world.settle_steps < 1) throw ConfigError("[world] k_stable and settle_steps must be >= 1");
  if (c.reward.view_cap <= 0.0 || c.reward.view_cap > 1.0) throw ConfigError("[reward] view_cap must be in (0,1]");
  if (c.reward.distance_total < 0.0 || c.reward.view_total < 0.0) throw ConfigError("[reward] totals must be >= 0");
  if (c.reward.camera_block_penalty > 0.0 || c.reward.wander_penalty > 0.0) {
    throw ConfigError("[reward] penalties must be <= 0");
  }
  for (const auto* p : {&c.taskspec, &c.openvocab}) {
    if (!prob(p->default_recall) || !prob(p->false_positive_rate)) {
      throw ConfigError("detector " + p->name + ": probabilities must be in [0,1]");
    }
    for (const auto& [cls, recall] : p->recall_by_class) {
      if (!prob(recall)) throw ConfigError("detector " + p->name + ": recall must be in [0,1]");
    }
    if (p->mask_erosion_px < 0) throw ConfigError("detector " + p->name + ": erosion must be >= 0");
  }
  if (c.agent.skill_budget < 1 || c.agent.global_budget < 1) throw ConfigError("[agent] budgets must be >= 1");
  if (c.skills == SkillMode::Replay) {
    if (c.replay_file.empty()) throw ConfigError("[agent] replay mode needs replay_file");
    if (!std::filesystem::exists(c.replay_file)) {
      throw IoError("replay file does not exist: " + c.replay_file.string());
    }
  }
  if (!c.dataset_path.empty() && !std::filesystem::exists(c.dataset_path)) {
    throw IoError("dataset file does not exist: " + c.dataset_path.string());
  }
}

}  // namespace ovmm::harness
