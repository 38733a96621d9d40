#include "ovmm/harness/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "ovmm/agent/scripted.hpp"
#include "ovmm/harness/dataset.hpp"

namespace ovmm::harness {

using task::Phase;

ReplayPlan replay_plan(const task::EpisodeTrace& trace) {
  ReplayPlan plan;
  std::size_t cursor = 0;
  for (const auto& skill : trace.skills) {
    std::vector<world::Action> actions;
    for (int k = 0; k < skill.outcome.steps_used && cursor < trace.steps.size(); ++k) {
      actions.push_back(trace.steps[cursor++].action);
    }
    plan[skill.phase].push_back(std::move(actions));
  }
  return plan;
}

SimEnv::SimEnv(const RunConfig& cfg, const task::Episode& ep, world::Scene scene, std::uint64_t seed)
    : cfg_(cfg),
      episode_(ep),
      scene_(std::move(scene)),
      world_rng_(derive_seed(seed, 1)),
      perception_rng_(derive_seed(seed, 2)) {
  agent_.base = ep.agent_start;
  agent_.start_base = ep.agent_start.position();
  ctx_.config = &cfg_.world;
  ctx_.camera = &cfg_.camera;
  ctx_.goal_object = ep.prompt.goal_object;
  ctx_.goal_receptacle = ep.prompt.goal_receptacle;
  trace_.episode_id = ep.id;
  refresh_view();
}

void SimEnv::refresh_view() {
  frame_ = world::render(scene_, agent_, cfg_.camera);
  const auto& task = episode_.prompt;
  switch (cfg_.perception) {
    case PerceptionMode::GroundTruth:
      labels_ = perception::ground_truth_labels(frame_);
      break;
    case PerceptionMode::TaskSpec:
      labels_ = perception::compose_priority(perception::detect(frame_, cfg_.taskspec, perception_rng_), task);
      break;
    case PerceptionMode::OpenVocab:
      labels_ = perception::compose_priority(perception::detect(frame_, cfg_.openvocab, perception_rng_), task);
      break;
    case PerceptionMode::Fused: {
      const auto ts = perception::detect(frame_, cfg_.taskspec, perception_rng_);
      const auto ov = perception::detect(frame_, cfg_.openvocab, perception_rng_);
      labels_ = perception::fuse(perception::compose_priority(ts, task), ov, task);
      break;
    }
  }
}

agent::Observation SimEnv::observe() {
  agent::Observation obs;
  obs.frame = &frame_;
  obs.labels = &labels_;
  obs.camera = &cfg_.camera;
  obs.pose = agent_.base;
  obs.holding = agent_.gripper_holding.has_value();
  obs.arm_extension = agent_.arm_extension;
  obs.arm_lift = agent_.arm_lift;
  obs.collided = collided_;
  obs.map_bounds = scene_.bounds;
  return obs;
}

double SimEnv::gripper_receptacle_distance() const {
  const Vec2 g = world::gripper_xy(agent_, cfg_.world);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : scene_.receptacles) {
    if (r.class_id == episode_.prompt.goal_receptacle) best = std::min(best, r.footprint.distance_to(g));
  }
  return best;
}

double SimEnv::goal_view_share() const {
  if (frame_.size() == 0) return 0.0;
  const auto n = std::count(frame_.class_map.begin(), frame_.class_map.end(), episode_.prompt.goal_receptacle);
  return static_cast<double>(n) / static_cast<double>(frame_.size());
}

void SimEnv::begin_phase(Phase p) {
  phase_ = p;
  if (p == Phase::Place) {
    agent_.start_base = agent_.base.position();
    reward_state_ = rewards::RewardState::begin(gripper_receptacle_distance());
  }
}

void SimEnv::step(const world::Action& a) {
  world::StepResult res = world::step_world(scene_, agent_, a, ctx_, world_rng_);
  agent_ = res.agent;
  collided_ = std::find(res.events.begin(), res.events.end(), world::Event::Collision) != res.events.end();

  if (res.placement) {
    placement_ = res.placement;
    steps_since_release_ = 0;
    const auto* hit = placement_->contact_receptacle ? scene_.find_receptacle(*placement_->contact_receptacle)
                                                     : nullptr;
    placement_on_goal_ = hit != nullptr && hit->class_id == episode_.prompt.goal_receptacle;
    trace_.placement = task::summarize_placement(*placement_, scene_, episode_);
  } else if (placement_) {
    ++steps_since_release_;
    if (placement_on_goal_ && steps_since_release_ < cfg_.world.settle_steps &&
        placement_->on_surface_at(steps_since_release_)) {
      res.events.push_back(world::Event::OnSurface);
    }
  }

  refresh_view();

  if (phase_ == Phase::Place) {
    rewards::Transition tr;
    tr.next = agent_;
    tr.d = gripper_receptacle_distance();
    tr.p = goal_view_share();
    tr.blocked_fraction = frame_.blocked_fraction;
    tr.with_events(res.events);
    sparse_total_ += rewards::sparse_place_reward(tr);
    if (std::isfinite(tr.d) && reward_state_.d_start && std::isfinite(*reward_state_.d_start)) {
      const auto shaped = rewards::shaped_place_reward(tr, cfg_.reward, reward_state_);
      shaped_total_ += shaped.total();
      reward_state_ = shaped.state;
    }
  }

  trace_.steps.push_back({phase_, a, std::move(res.events), frame_.blocked_fraction});
}

bool SimEnv::check_phase(Phase p) {
  switch (p) {
    case Phase::NavToObj: return task::check_nav_to_obj(agent_, scene_, episode_, frame_);
    case Phase::Gaze: return task::check_pick(agent_, scene_, episode_);
    case Phase::NavToRec: return task::check_nav_to_rec(agent_, scene_, episode_);
    case Phase::Place: return placement_.has_value() && task::check_place(*placement_, scene_, episode_);
    case Phase::Done: break;
  }
  return false;
}

agent::SkillSet make_skills(const RunConfig& cfg, const task::Episode& ep, const ReplayPlan* plan) {
  agent::SkillSet s;
  if (cfg.skills == SkillMode::Replay) {
    if (plan == nullptr) throw ConfigError("replay mode: no recorded trace for episode " + std::to_string(ep.id));
    auto invocations = [&](Phase p) {
      auto it = plan->find(p);
      return it == plan->end() ? std::vector<std::vector<world::Action>>{} : it->second;
    };
    s.nav_to_obj = std::make_unique<agent::ReplaySkill>(invocations(Phase::NavToObj));
    s.gaze = std::make_unique<agent::ReplaySkill>(invocations(Phase::Gaze));
    s.nav_to_rec = std::make_unique<agent::ReplaySkill>(invocations(Phase::NavToRec));
    s.place = std::make_unique<agent::ReplaySkill>(invocations(Phase::Place));
    return s;
  }
  using Kind = agent::NavSkill::TargetKind;
  s.nav_to_obj = std::make_unique<agent::NavSkill>(ep.prompt.goal_object, Kind::Object);
  s.gaze = std::make_unique<agent::GazeSkill>(ep.prompt.goal_object);
  s.nav_to_rec = std::make_unique<agent::NavSkill>(ep.prompt.goal_receptacle, Kind::Receptacle);
  s.place = std::make_unique<agent::PlaceSkill>(ep.prompt.goal_receptacle);
  return s;
}

EpisodeResult run_episode(const RunConfig& cfg, const world::SceneSpec& spec, const task::Episode& ep,
                          const ReplayPlan* plan, bool keep_trace) {
  const auto t0 = std::chrono::steady_clock::now();
  EpisodeResult r;
  r.episode_id = ep.id;
  std::optional<SimEnv> env;
  try {
    env.emplace(cfg, ep, instantiate_scene(ep, spec), episode_seed(cfg.master_seed, ep.id));
    agent::SkillSet skills = make_skills(cfg, ep, plan);
    const agent::FsmState end = agent::run_episode(*env, skills, cfg.agent, ep.step_budget);
    env->trace().retry_count = end.retry_count;
    r.flags = task::episode_flags(env->trace());
    r.failure_cause = task::classify_place_failure(env->trace());
  } catch (const std::exception& e) {
    r.flags = {};
    r.failure_cause = task::FailureCause::Uncertain;
    r.error = e.what();
  }
  if (env) {
    r.steps = env->steps_taken();
    r.sparse_reward = env->sparse_reward();
    r.shaped_reward = env->shaped_reward();
    r.retry_count = env->trace().retry_count;
    if (keep_trace) r.trace = env->trace();
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace ovmm::harness
