#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ovmm/agent/skill.hpp"
#include "ovmm/common/rng.hpp"
#include "ovmm/harness/config.hpp"
#include "ovmm/task/evaluation.hpp"

namespace ovmm::harness {

struct EpisodeResult {
  int episode_id = 0;
  task::SuccessFlags flags;
  task::FailureCause failure_cause = task::FailureCause::Uncertain;
  int steps = 0;
  double sparse_reward = 0.0;
  double shaped_reward = 0.0;
  int retry_count = 0;
  double wall_time_s = 0.0;
  /// Set when the episode threw; flags are then all false.
  std::optional<std::string> error;
  std::optional<task::EpisodeTrace> trace;
};

/// Recorded actions for one episode, grouped per phase and per invocation.
using ReplayPlan = std::map<task::Phase, std::vector<std::vector<world::Action>>>;

/// Splits a trace's steps into the skill invocations that produced them.
ReplayPlan replay_plan(const task::EpisodeTrace& trace);

/// The simulator seen through one perception pipeline, with the bookkeeping
/// the high-level loop and the evaluator need.
class SimEnv : public agent::EpisodeEnv {
 public:
  SimEnv(const RunConfig& cfg, const task::Episode& ep, world::Scene scene, std::uint64_t seed);

  agent::Observation observe() override;
  void step(const world::Action& a) override;
  void begin_phase(task::Phase p) override;
  bool check_phase(task::Phase p) override;
  bool holding() const override { return agent_.gripper_holding.has_value(); }
  int steps_taken() const override { return static_cast<int>(trace_.steps.size()); }
  void record_skill(const task::SkillRecord& record) override { trace_.skills.push_back(record); }

  const world::Scene& scene() const { return scene_; }
  const world::AgentState& agent_state() const { return agent_; }
  const world::Frame& frame() const { return frame_; }
  const perception::LabelMap& labels() const { return labels_; }
  task::EpisodeTrace& trace() { return trace_; }
  double sparse_reward() const { return sparse_total_; }
  double shaped_reward() const { return shaped_total_; }

 private:
  void refresh_view();
  double gripper_receptacle_distance() const;
  double goal_view_share() const;

  const RunConfig& cfg_;
  task::Episode episode_;
  world::Scene scene_;
  world::AgentState agent_;
  world::StepContext ctx_;
  Rng world_rng_;
  Rng perception_rng_;
  world::Frame frame_;
  perception::LabelMap labels_;
  bool collided_ = false;
  task::Phase phase_ = task::Phase::NavToObj;
  task::EpisodeTrace trace_;
  std::optional<world::PlacementOutcome> placement_;
  bool placement_on_goal_ = false;
  int steps_since_release_ = 0;
  rewards::RewardState reward_state_;
  double sparse_total_ = 0.0;
  double shaped_total_ = 0.0;
};

/// Builds the four skills for an episode. Replay mode needs a plan.
agent::SkillSet make_skills(const RunConfig& cfg, const task::Episode& ep, const ReplayPlan* plan);

/// Per-episode seed derived from the batch seed.
inline std::uint64_t episode_seed(std::uint64_t master_seed, int episode_id) {
  return master_seed ^ static_cast<std::uint64_t>(episode_id);
}

/// Runs one episode end to end. Exceptions inside the episode are caught and
/// reported as a failed result.
EpisodeResult run_episode(const RunConfig& cfg, const world::SceneSpec& spec, const task::Episode& ep,
                          const ReplayPlan* plan = nullptr, bool keep_trace = false);

}  // namespace ovmm::harness
