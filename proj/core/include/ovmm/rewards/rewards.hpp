#pragma once

#include <optional>
#include <stdexcept>

#include "ovmm/world/world.hpp"

namespace ovmm::rewards {

/// Place-skill reward parameters. Defaults are the trained configuration.
struct RewardConfig {
  double contact_bonus = 70.0;
  double contact_per_step = 25.0;
  double distance_total = 40.0;
  double d_min = 0.2;
  double view_total = 30.0;
  /// Goal-receptacle share of frame pixels at which view reward saturates.
  double view_cap = 0.30;
  double camera_block_penalty = -5.0;
  double wander_penalty = -5.0;
  double wander_radius = 1.5;
  double block_fraction_threshold = 0.2;
  /// Number of on-surface steps that earn contact_per_step.
  int contact_step_cap = 5;
};

/// Per-episode shaping memory. Potentials only ever increase, so each unit of
/// progress is paid once.
struct RewardState {
  std::optional<double> d_start;
  double best_distance_potential = 0.0;
  double best_view_potential = 0.0;
  int contact_steps_paid = 0;

  static RewardState begin(double d_start) { return RewardState{d_start, 0.0, 0.0, 0}; }
};

struct Transition {
  world::AgentState next;
  /// Gripper distance to the nearest goal-receptacle footprint.
  double d = 0.0;
  /// Fraction of frame pixels showing the goal receptacle.
  double p = 0.0;
  double blocked_fraction = 0.0;
  bool contact_drop = false;
  bool on_surface = false;
  bool off_surface_drop = false;

  /// Sets the event flags from a world event list.
  Transition& with_events(const world::EventList& events);
};

class UninitializedState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// +5 contact drop, +1 per on-surface step, -1 for a drop that missed.
double sparse_place_reward(const Transition& tr);

double distance_potential(double d, double d_start, double d_min);
double view_potential(double p, double view_cap);

struct ShapedReward {
  double distance_term = 0.0;
  double view_term = 0.0;
  double contact_term = 0.0;
  double penalty_term = 0.0;
  RewardState state;

  double total() const { return distance_term + view_term + contact_term + penalty_term; }
};

ShapedReward shaped_place_reward(const Transition& tr, const RewardConfig& cfg, const RewardState& st);

}  // namespace ovmm::rewards
