#include "ovmm/task/evaluation.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace ovmm::task {

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::NavToObj: return "nav_to_obj";
    case Phase::Gaze: return "gaze";
    case Phase::NavToRec: return "nav_to_rec";
    case Phase::Place: return "place";
    case Phase::Done: return "done";
  }
  return "unknown";
}

bool check_nav_to_obj(const world::AgentState& agent, const world::Scene& scene, const Episode& ep,
                      const world::Frame& frame, double radius) {
  const Vec2 base = agent.base.position();
  for (const auto& obj : scene.objects) {
    if (obj.class_id != ep.prompt.goal_object) continue;
    if (obj.resting_on.kind == world::Support::Kind::Held) continue;
    if (distance(base, obj.position.xy()) > radius) continue;
    if (std::find(frame.instance_map.begin(), frame.instance_map.end(), obj.id) !=
        frame.instance_map.end()) {
      return true;
    }
  }
  return false;
}

bool check_pick(const world::AgentState& agent, const world::Scene& scene, const Episode& ep) {
  if (!agent.gripper_holding) return false;
  const auto* obj = scene.find_object(*agent.gripper_holding);
  return obj != nullptr && obj->class_id == ep.prompt.goal_object;
}

bool check_nav_to_rec(const world::AgentState& agent, const world::Scene& scene, const Episode& ep,
                      double radius) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : scene.receptacles) {
    if (r.class_id == ep.prompt.goal_receptacle) {
      best = std::min(best, r.footprint.distance_to(agent.base.position()));
    }
  }
  return best <= radius;
}

PlacementSummary summarize_placement(const world::PlacementOutcome& outcome,
                                     const world::Scene& scene, const Episode& ep) {
  PlacementSummary s;
  s.drop_height = outcome.drop_height;
  s.stable = outcome.stable;
  if (outcome.contact_receptacle) {
    const auto* r = scene.find_receptacle(*outcome.contact_receptacle);
    s.landed_on_goal = r != nullptr && r->class_id == ep.prompt.goal_receptacle;
  }
  if (outcome.support.kind == world::Support::Kind::Receptacle) {
    const auto* r = scene.find_receptacle(outcome.support.receptacle_id);
    s.on_goal_receptacle = r != nullptr && r->class_id == ep.prompt.goal_receptacle;
  }
  return s;
}

bool check_place(const world::PlacementOutcome& outcome, const world::Scene& scene, const Episode& ep) {
  const PlacementSummary s = summarize_placement(outcome, scene, ep);
  return s.on_goal_receptacle && s.stable;
}

SuccessFlags episode_flags(const EpisodeTrace& trace) {
  auto last_check = [&](Phase p) {
    for (auto it = trace.skills.rbegin(); it != trace.skills.rend(); ++it) {
      if (it->phase == p) return it->check;
    }
    return false;
  };
  SuccessFlags f;
  f.nav_to_obj = last_check(Phase::NavToObj);
  f.pick = last_check(Phase::Gaze);
  f.nav_to_rec = last_check(Phase::NavToRec);
  f.place = trace.placement.has_value() && trace.placement->on_goal_receptacle &&
            trace.placement->stable;
  return f.gated();
}

MetricsReport aggregate_metrics(std::span<const SuccessFlags> flags) {
  if (flags.empty()) throw EmptyInput("aggregate_metrics: no episodes");
  std::array<long, 4> counts{};
  for (const auto& raw : flags) {
    const SuccessFlags f = raw.gated();
    counts[0] += f.nav_to_obj;
    counts[1] += f.pick;
    counts[2] += f.nav_to_rec;
    counts[3] += f.place;
  }
  const double n = static_cast<double>(flags.size());
  MetricsReport m;
  m.n_episodes = static_cast<int>(flags.size());
  m.nav_to_obj = 100.0 * static_cast<double>(counts[0]) / n;
  m.pick = 100.0 * static_cast<double>(counts[1]) / n;
  m.nav_to_rec = 100.0 * static_cast<double>(counts[2]) / n;
  m.overall_success_rate = 100.0 * static_cast<double>(counts[3]) / n;
  m.partial_success_metric = (m.nav_to_obj + m.pick + m.nav_to_rec + m.overall_success_rate) / 4.0;
  m.relative = relative_rates(m.absolute());
  return m;
}

std::array<double, 4> relative_rates(const std::array<double, 4>& a) {
  std::array<double, 4> r{};
  r[0] = a[0];
  for (std::size_t k = 1; k < 4; ++k) r[k] = a[k - 1] == 0.0 ? 0.0 : 100.0 * a[k] / a[k - 1];
  return r;
}

std::array<double, 4> relative_rates(const MetricsReport& report) {
  return relative_rates(report.absolute());
}

std::string_view failure_cause_name(FailureCause c) {
  switch (c) {
    case FailureCause::UnstablePlace: return "unstable place";
    case FailureCause::MissedReceptacle: return "missed receptacle";
    case FailureCause::CameraOverlap: return "camera overlap with manipulator";
    case FailureCause::DidNotStartPlace: return "did not start place skill";
    case FailureCause::Uncertain: return "uncertain";
    case FailureCause::NotFailed: return "not failed";
  }
  return "unknown";
}

FailureCause parse_failure_cause(std::string_view name) {
  for (auto c : {FailureCause::UnstablePlace, FailureCause::MissedReceptacle,
                 FailureCause::CameraOverlap, FailureCause::DidNotStartPlace,
                 FailureCause::Uncertain, FailureCause::NotFailed}) {
    if (failure_cause_name(c) == name) return c;
  }
  throw std::invalid_argument("unknown failure cause: " + std::string(name));
}

FailureCause classify_place_failure(const EpisodeTrace& trace) {
  if (episode_flags(trace).place) return FailureCause::NotFailed;

  const bool entered_place =
      std::any_of(trace.skills.begin(), trace.skills.end(),
                  [](const SkillRecord& s) { return s.phase == Phase::Place; }) ||
      std::any_of(trace.steps.begin(), trace.steps.end(),
                  [](const StepRecord& s) { return s.phase == Phase::Place; });
  if (!entered_place) return FailureCause::DidNotStartPlace;

  if (trace.placement) {
    // Touching the goal surface and then rolling off or never settling is an
    // unstable place; never touching it is a miss.
    if (!trace.placement->landed_on_goal) return FailureCause::MissedReceptacle;
    if (!trace.placement->on_goal_receptacle || !trace.placement->stable) return FailureCause::UnstablePlace;
    return FailureCause::Uncertain;
  }

  int place_frames = 0;
  int covered = 0;
  for (const auto& s : trace.steps) {
    if (s.phase != Phase::Place) continue;
    ++place_frames;
    if (s.blocked_fraction > kOverlapBlockedFraction) ++covered;
  }
  if (place_frames > 0 &&
      static_cast<double>(covered) >= kOverlapFrameShare * static_cast<double>(place_frames)) {
    return FailureCause::CameraOverlap;
  }
  return FailureCause::Uncertain;
}

std::vector<CauseShare> failure_histogram(std::span<const FailureCause> causes) {
  std::array<int, 5> counts{};
  int total = 0;
  for (auto c : causes) {
    if (c == FailureCause::NotFailed) continue;
    ++counts[static_cast<std::size_t>(c)];
    ++total;
  }
  std::vector<CauseShare> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    out.push_back({static_cast<FailureCause>(i), counts[i], 100.0 * counts[i] / total});
  }
  std::stable_sort(out.begin(), out.end(), [](const CauseShare& a, const CauseShare& b) {
    const bool a_last = a.cause == FailureCause::Uncertain;
    const bool b_last = b.cause == FailureCause::Uncertain;
    if (a_last != b_last) return b_last;
    return a.count > b.count;
  });
  return out;
}

}  // namespace ovmm::task
