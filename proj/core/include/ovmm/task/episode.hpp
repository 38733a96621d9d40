#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ovmm/perception/fusion.hpp"
#include "ovmm/world/world.hpp"

namespace ovmm::task {

using perception::TaskClasses;

/// "Move (object) from the (start receptacle) to the (goal receptacle)."
struct Episode {
  int id = 0;
  std::uint64_t scene_seed = 0;
  TaskClasses prompt;
  Pose2 agent_start;
  int step_budget = 2000;
};

/// Four sequential subtask outcomes. A flag may be true only when every
/// preceding flag is true; place doubles as overall success.
struct SuccessFlags {
  bool nav_to_obj = false;
  bool pick = false;
  bool nav_to_rec = false;
  bool place = false;

  /// Clears every flag that follows a false one.
  SuccessFlags gated() const {
    SuccessFlags g = *this;
    g.pick = g.pick && g.nav_to_obj;
    g.nav_to_rec = g.nav_to_rec && g.pick;
    g.place = g.place && g.nav_to_rec;
    return g;
  }
  bool is_gated() const { return gated() == *this; }

  friend bool operator==(const SuccessFlags&, const SuccessFlags&) = default;
};

/// High-level phases; each of the first four runs one skill.
enum class Phase : std::uint8_t { NavToObj, Gaze, NavToRec, Place, Done };

std::string_view phase_name(Phase p);

struct SkillOutcome {
  enum class Status : std::uint8_t { Stopped, BudgetExhausted };
  Status status = Status::Stopped;
  int steps_used = 0;

  friend bool operator==(const SkillOutcome&, const SkillOutcome&) = default;
};

struct StepRecord {
  Phase phase = Phase::NavToObj;
  world::Action action;
  world::EventList events;
  double blocked_fraction = 0.0;
};

/// A skill invocation and its subtask check, evaluated when the skill ended.
struct SkillRecord {
  Phase phase = Phase::NavToObj;
  SkillOutcome outcome;
  bool check = false;
};

struct PlacementSummary {
  /// The released object first came down on a goal-receptacle surface.
  bool landed_on_goal = false;
  /// Still resting on a goal receptacle at the end of the settle horizon.
  bool on_goal_receptacle = false;
  bool stable = false;
  double drop_height = 0.0;
};

struct EpisodeTrace {
  int episode_id = 0;
  std::vector<StepRecord> steps;
  std::vector<SkillRecord> skills;
  std::optional<PlacementSummary> placement;
  int retry_count = 0;
};

}  // namespace ovmm::task
