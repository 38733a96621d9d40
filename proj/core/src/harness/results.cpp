#include "ovmm/harness/results.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace ovmm::harness {

using nlohmann::json;
using task::Phase;

namespace {

json action_to_json(const world::Action& a) {
  if (const auto* m = std::get_if<world::action::Manip>(&a)) {
    return json::array({"manip", m->d_base, m->d_theta, m->d_ext, m->d_lift});
  }
  return std::string(world::action_name(a));
}

world::Action action_from_json(const json& j) {
  namespace act = world::action;
  if (j.is_array()) {
    if (j.size() != 5 || j.at(0) != "manip") throw IoError("malformed action " + j.dump());
    return act::Manip{j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>(),
                      j.at(4).get<double>()};
  }
  const std::string name = j.get<std::string>();
  for (const world::Action& a : {world::Action{act::Forward{}}, world::Action{act::TurnLeft{}},
                                 world::Action{act::TurnRight{}}, world::Action{act::Snap{}},
                                 world::Action{act::Release{}}, world::Action{act::Stop{}}}) {
    if (world::action_name(a) == name) return a;
  }
  throw IoError("unknown action '" + name + "'");
}

Phase phase_from_name(const std::string& name) {
  for (auto p : {Phase::NavToObj, Phase::Gaze, Phase::NavToRec, Phase::Place, Phase::Done}) {
    if (task::phase_name(p) == name) return p;
  }
  throw IoError("unknown phase '" + name + "'");
}

world::Event event_from_name(const std::string& name) {
  using world::Event;
  for (auto e : {Event::Collision, Event::PickSuccess, Event::PickFail, Event::Released, Event::ContactDrop,
                 Event::OffSurfaceDrop, Event::OnSurface}) {
    if (world::event_name(e) == name) return e;
  }
  throw IoError("unknown event '" + name + "'");
}

json flags_to_json(const task::SuccessFlags& f) {
  return json{{"nav_to_obj", f.nav_to_obj}, {"pick", f.pick}, {"nav_to_rec", f.nav_to_rec}, {"place", f.place}};
}

template <typename Fn>
auto guarded(const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw IoError("malformed " + what + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError("malformed " + what + ": " + e.what());
  }
}

}  // namespace

std::string result_line(const EpisodeResult& r) {
  json j{{"id", r.episode_id},
         {"flags", flags_to_json(r.flags)},
         {"failure_cause", std::string(task::failure_cause_name(r.failure_cause))},
         {"steps", r.steps},
         {"sparse_reward", r.sparse_reward},
         {"shaped_reward", r.shaped_reward},
         {"retry_count", r.retry_count}};
  if (r.error) j["error"] = *r.error;
  return j.dump();
}

std::string timing_line(const EpisodeResult& r) {
  return json{{"id", r.episode_id}, {"wall_time_s", r.wall_time_s}}.dump();
}

std::string trace_line(int episode_id, const task::EpisodeTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    json events = json::array();
    for (auto e : s.events) events.push_back(std::string(world::event_name(e)));
    steps.push_back(json::array({std::string(task::phase_name(s.phase)), action_to_json(s.action), events,
                                 s.blocked_fraction}));
  }
  json skills = json::array();
  for (const auto& s : t.skills) {
    skills.push_back(json{{"phase", std::string(task::phase_name(s.phase))},
                          {"status", s.outcome.status == task::SkillOutcome::Status::Stopped ? "stopped"
                                                                                             : "budget_exhausted"},
                          {"steps", s.outcome.steps_used},
                          {"check", s.check}});
  }
  json j{{"id", episode_id}, {"retry_count", t.retry_count}, {"skills", skills}, {"steps", steps}};
  if (t.placement) {
    j["placement"] = json{{"landed_on_goal", t.placement->landed_on_goal},
                          {"on_goal_receptacle", t.placement->on_goal_receptacle},
                          {"stable", t.placement->stable},
                          {"drop_height", t.placement->drop_height}};
  }
  return j.dump();
}

EpisodeResult parse_result_line(const std::string& line) {
  return guarded("results record", [&] {
    const json j = json::parse(line);
    EpisodeResult r;
    r.episode_id = j.at("id").get<int>();
    const auto& f = j.at("flags");
    r.flags = {f.at("nav_to_obj").get<bool>(), f.at("pick").get<bool>(), f.at("nav_to_rec").get<bool>(),
               f.at("place").get<bool>()};
    r.failure_cause = task::parse_failure_cause(j.at("failure_cause").get<std::string>());
    r.steps = j.at("steps").get<int>();
    r.sparse_reward = j.at("sparse_reward").get<double>();
    r.shaped_reward = j.at("shaped_reward").get<double>();
    r.retry_count = j.at("retry_count").get<int>();
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    return r;
  });
}

task::EpisodeTrace parse_trace_line(const std::string& line) {
  return guarded("trace record", [&] {
    const json j = json::parse(line);
    task::EpisodeTrace t;
    t.episode_id = j.at("id").get<int>();
    t.retry_count = j.at("retry_count").get<int>();
    for (const auto& s : j.at("skills")) {
      task::SkillRecord rec;
      rec.phase = phase_from_name(s.at("phase").get<std::string>());
      rec.outcome.status = s.at("status").get<std::string>() == "stopped"
                               ? task::SkillOutcome::Status::Stopped
                               : task::SkillOutcome::Status::BudgetExhausted;
      rec.outcome.steps_used = s.at("steps").get<int>();
      rec.check = s.at("check").get<bool>();
      t.skills.push_back(rec);
    }
    for (const auto& s : j.at("steps")) {
      task::StepRecord rec;
      rec.phase = phase_from_name(s.at(0).get<std::string>());
      rec.action = action_from_json(s.at(1));
      for (const auto& e : s.at(2)) rec.events.push_back(event_from_name(e.get<std::string>()));
      rec.blocked_fraction = s.at(3).get<double>();
      t.steps.push_back(std::move(rec));
    }
    if (j.contains("placement")) {
      const auto& p = j.at("placement");
      t.placement = task::PlacementSummary{p.at("landed_on_goal").get<bool>(), p.at("on_goal_receptacle").get<bool>(), p.at("stable").get<bool>(),
                                           p.at("drop_height").get<double>()};
    }
    return t;
  });
}

std::vector<EpisodeResult> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read results file " + path.string());
  std::vector<EpisodeResult> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_result_line(line));
  }
  return out;
}

std::map<int, task::EpisodeTrace> read_traces(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read trace file " + path.string());
  std::map<int, task::EpisodeTrace> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto t = parse_trace_line(line);
    const int id = t.episode_id;
    out[id] = std::move(t);
  }
  return out;
}

}  // namespace ovmm::harness
