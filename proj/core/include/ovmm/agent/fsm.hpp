#pragma once

#include "ovmm/task/episode.hpp"

namespace ovmm::agent {

using task::Phase;
using task::SkillOutcome;

struct FsmState {
  Phase phase = Phase::NavToObj;
  int retry_count = 0;
  int steps_in_skill = 0;

  friend bool operator==(const FsmState&, const FsmState&) = default;
};

struct AgentConfig {
  /// Loop back to NavToObj after a Gaze that did not pick the object. When
  /// off, skills simply chain in order.
  bool retry_loop = true;
  int skill_budget = 500;
  int global_budget = 2000;
};

/// High-level skill switching after a skill terminates.
///
/// NavToObj -> Gaze -> NavToRec -> Place -> Done. When the retry loop is on,
/// a Gaze that ends without the object in the gripper goes back to NavToObj
/// and bumps retry_count. An exhausted episode budget ends the episode from
/// any state. Done is absorbing.
FsmState high_level_step(const FsmState& s, const SkillOutcome& outcome, bool holding,
                         bool retry_loop = true, bool episode_budget_exhausted = false);

}  // namespace ovmm::agent
