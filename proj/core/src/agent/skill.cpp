#include "ovmm/agent/skill.hpp"

#include <algorithm>
#include <stdexcept>

namespace ovmm::agent {

SkillOutcome run_skill(Skill& skill, Env& env, int budget) {
  skill.begin();
  int used = 0;
  while (used < budget) {
    const world::Action a = skill.act(env.observe());
    env.step(a);
    ++used;
    if (world::is_stop(a)) return {SkillOutcome::Status::Stopped, used};
  }
  return {SkillOutcome::Status::BudgetExhausted, used};
}

Skill& SkillSet::for_phase(Phase p) {
  Skill* s = nullptr;
  switch (p) {
    case Phase::NavToObj: s = nav_to_obj.get(); break;
    case Phase::Gaze: s = gaze.get(); break;
    case Phase::NavToRec: s = nav_to_rec.get(); break;
    case Phase::Place: s = place.get(); break;
    case Phase::Done: break;
  }
  if (s == nullptr) throw std::logic_error("no skill bound for this phase");
  return *s;
}

FsmState run_episode(EpisodeEnv& env, SkillSet& skills, const AgentConfig& cfg, int episode_budget) {
  const int budget = std::min(cfg.global_budget, episode_budget);
  FsmState s;
  while (s.phase != Phase::Done) {
    const int remaining = budget - env.steps_taken();
    if (remaining <= 0) {
      s = high_level_step(s, {}, env.holding(), cfg.retry_loop, true);
      break;
    }
    env.begin_phase(s.phase);
    const SkillOutcome out =
        run_skill(skills.for_phase(s.phase), env, std::min(cfg.skill_budget, remaining));
    s.steps_in_skill = out.steps_used;
    const bool exhausted = env.steps_taken() >= budget;
    const bool cut_by_episode =
        exhausted && out.status == SkillOutcome::Status::BudgetExhausted;
    const bool check = !cut_by_episode && env.check_phase(s.phase);
    env.record_skill({s.phase, out, check});
    s = high_level_step(s, out, env.holding(), cfg.retry_loop, exhausted);
  }
  return s;
}

}  // namespace ovmm::agent
