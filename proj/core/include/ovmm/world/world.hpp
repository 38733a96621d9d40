#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "ovmm/common/rng.hpp"
#include "ovmm/world/scene.hpp"

namespace ovmm::world {

struct CameraConfig;

struct WorldConfig {
  double forward_step = 0.25;
  double turn_step = deg_to_rad(30.0);
  double agent_radius = 0.2;

  double max_manip_base = 0.1;
  double max_manip_theta = deg_to_rad(10.0);
  double max_manip_extension = 0.1;
  double max_manip_lift = 0.1;
  double max_arm_extension = 0.8;
  double max_arm_lift = 1.2;

  double snap_range = 1.0;
  double snap_cone = deg_to_rad(10.0);
  /// Probability that an otherwise valid Snap fails (pick noise injection).
  double snap_failure_prob = 0.0;

  double v_stable = 0.05;
  int k_stable = 5;
  double impact_gain = 0.5;
  double damping = 0.5;
  int settle_steps = 30;
};

struct AgentState {
  Pose2 base;
  double arm_extension = 0.0;
  double arm_lift = 0.0;
  std::optional<int> gripper_holding;
  /// Base position at the start of the place phase; anchors the wander penalty.
  Vec2 start_base;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

/// Horizontal gripper position: the arm reaches forward from the base rim.
Vec2 gripper_xy(const AgentState& agent, const WorldConfig& cfg);
Vec3 gripper_position(const AgentState& agent, const WorldConfig& cfg);

namespace action {
struct Forward {};
struct TurnLeft {};
struct TurnRight {};
struct Manip {
  double d_base = 0.0;
  double d_theta = 0.0;
  double d_ext = 0.0;
  double d_lift = 0.0;
};
struct Snap {};
struct Release {};
struct Stop {};
}  // namespace action

using Action = std::variant<action::Forward, action::TurnLeft, action::TurnRight, action::Manip,
                            action::Snap, action::Release, action::Stop>;

std::string_view action_name(const Action& a);
inline bool is_stop(const Action& a) { return std::holds_alternative<action::Stop>(a); }

enum class Event {
  Collision,
  PickSuccess,
  PickFail,
  Released,
  /// Released object landed on a goal-receptacle surface.
  ContactDrop,
  /// Released object missed every goal-receptacle surface.
  OffSurfaceDrop,
  /// Placed object rests on a goal-receptacle surface this step.
  OnSurface,
};

std::string_view event_name(Event e);

using EventList = std::vector<Event>;

class InvalidAction : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct PlacementOutcome {
  int object_id = 0;
  /// Support at the end of the settle horizon.
  Support support;
  /// Receptacle hit at the moment of release, before any roll-off.
  std::optional<int> contact_receptacle;
  double drop_height = 0.0;
  /// Residual speed per settle step (m/step), non-increasing.
  std::vector<double> speeds;
  /// Settle step at which the object rolled off its surface, if it did.
  std::optional<int> roll_off_step;
  bool stable = false;
  Vec3 final_position;

  /// Whether the object is on its contact surface at settle step t.
  bool on_surface_at(int t) const {
    return contact_receptacle.has_value() && (!roll_off_step || t < *roll_off_step);
  }
};

/// Drops the held object from the gripper and integrates the decaying residual
/// motion along the agent heading. Does not modify the scene.
PlacementOutcome settle_object(const Scene& scene, const AgentState& agent, const WorldConfig& cfg);

/// Episode-level knobs the world needs to resolve Snap and placement events.
struct StepContext {
  const WorldConfig* config = nullptr;
  /// Used for the Snap line-of-sight test.
  const CameraConfig* camera = nullptr;
  ClassId goal_object;
  ClassId goal_receptacle;
};

struct StepResult {
  AgentState agent;
  EventList events;
  std::optional<PlacementOutcome> placement;
};

/// Applies one action. Scene is updated in place for Snap/Release (object
/// ownership moves); the agent successor is returned.
StepResult step_world(Scene& scene, const AgentState& agent, const Action& a,
                      const StepContext& ctx, Rng& rng);

/// Collision check for a disc at p against walls, bounds and furniture.
bool base_blocked(const Scene& scene, Vec2 p, double radius);

}  // namespace ovmm::world
