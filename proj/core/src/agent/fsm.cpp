#include "ovmm/agent/fsm.hpp"

namespace ovmm::agent {

FsmState high_level_step(const FsmState& s, const SkillOutcome& outcome, bool holding,
                         bool retry_loop, bool episode_budget_exhausted) {
  FsmState next = s;
  next.steps_in_skill = 0;
  if (s.phase == Phase::Done || episode_budget_exhausted) {
    next.phase = Phase::Done;
    return next;
  }
  // A skill cut by its own budget hands over exactly like one that stopped.
  (void)outcome;
  switch (s.phase) {
    case Phase::NavToObj:
      next.phase = Phase::Gaze;
      break;
    case Phase::Gaze:
      if (holding || !retry_loop) {
        next.phase = Phase::NavToRec;
      } else {
        next.phase = Phase::NavToObj;
        ++next.retry_count;
      }
      break;
    case Phase::NavToRec:
      next.phase = Phase::Place;
      break;
    case Phase::Place:
    case Phase::Done:
      next.phase = Phase::Done;
      break;
  }
  return next;
}

}  // namespace ovmm::agent
