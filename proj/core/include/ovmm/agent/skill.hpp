#pragma once

#include <array>
#include <memory>
#include <vector>

#include "ovmm/agent/fsm.hpp"
#include "ovmm/perception/fusion.hpp"
#include "ovmm/world/render.hpp"

namespace ovmm::agent {

/// What a skill sees each step: the egocentric frame, the perception
/// module's label map, and proprioception.
struct Observation {
  const world::Frame* frame = nullptr;
  const perception::LabelMap* labels = nullptr;
  const world::CameraConfig* camera = nullptr;
  Pose2 pose;
  bool holding = false;
  double arm_extension = 0.0;
  double arm_lift = 0.0;
  /// The previous step bumped into something.
  bool collided = false;
  /// Extent of the environment, used to size internal maps.
  Rect map_bounds;
};

/// A low-level policy. Its memory lives in the object and persists across
/// invocations within one episode.
class Skill {
 public:
  virtual ~Skill() = default;
  /// Called when the high-level policy hands control to this skill.
  virtual void begin() {}
  virtual world::Action act(const Observation& obs) = 0;
};

/// Execution surface a skill runs against.
class Env {
 public:
  virtual ~Env() = default;
  virtual Observation observe() = 0;
  virtual void step(const world::Action& a) = 0;
};

/// Queries the skill and applies its actions until it emits Stop (which
/// counts as a step) or the budget runs out.
SkillOutcome run_skill(Skill& skill, Env& env, int budget);

/// Env plus the hooks the high-level loop needs.
class EpisodeEnv : public Env {
 public:
  virtual void begin_phase(Phase p) = 0;
  /// Subtask check for the phase that just ended.
  virtual bool check_phase(Phase p) = 0;
  virtual bool holding() const = 0;
  virtual int steps_taken() const = 0;
  virtual void record_skill(const task::SkillRecord& record) = 0;
};

struct SkillSet {
  std::unique_ptr<Skill> nav_to_obj;
  std::unique_ptr<Skill> gaze;
  std::unique_ptr<Skill> nav_to_rec;
  std::unique_ptr<Skill> place;

  Skill& for_phase(Phase p);
};

/// Drives the FSM until Done or the episode budget is spent. A skill cut off
/// by the episode budget records a failed check.
FsmState run_episode(EpisodeEnv& env, SkillSet& skills, const AgentConfig& cfg, int episode_budget);

}  // namespace ovmm::agent
