#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "ovmm/agent/occupancy.hpp"
#include "ovmm/agent/skill.hpp"

namespace ovmm::agent {

/// Where one class shows up in the current label map.
struct TargetView {
  bool visible = false;
  int pixels = 0;
  double min_depth = 0.0;
  /// Mean azimuth of the nearest cluster relative to the heading.
  double bearing = 0.0;
  /// Back-projected nearest hit.
  Vec2 nearest_point;
  /// Mean back-projected point of the nearest cluster.
  Vec2 cluster_center;
  /// Highest hit among the nearest cluster's pixels.
  double max_height = 0.0;
};

/// Locates `cls` in the label map, ignoring arm pixels. Pixels farther than
/// `cluster_tolerance` beyond the nearest one belong to other instances.
/// `max_bearing` restricts the search to columns near the optical axis.
TargetView find_target(const Observation& obs, ClassId cls, double cluster_tolerance,
                       double max_bearing = kPi);

/// Discrete-action navigation: builds an occupancy grid from depth, plans to
/// the back-projected target when it has been seen, otherwise explores the
/// nearest frontier.
class NavSkill : public Skill {
 public:
  enum class TargetKind { Object, Receptacle };

  struct Config {
    double stop_radius = 0.85;
    /// Bumping into things twice this close to the target also ends navigation.
    double blocked_stop_radius = 0.95;
    double approach_radius = 0.75;
    double stop_bearing = deg_to_rad(25.0);
    double turn_threshold = deg_to_rad(20.0);
    double inflation = 0.25;
    double tight_inflation = 0.1;
    double grid_resolution = 0.1;
    int initial_spin = 12;
    /// Re-sightings closer than this to the current target keep the old one.
    double target_hysteresis = 0.15;
    /// Two consecutive sightings within this distance confirm a target.
    double confirm_radius = 0.5;
    /// Sightings near a target abandoned by an earlier invocation are ignored.
    double reject_radius = 0.4;
    /// A target handed back this many times in a row is given up on.
    int max_returns = 3;
    /// A target handed back is approached again from at least this far away
    /// from the spots where earlier attempts stopped.
    double fresh_standpoint = 0.3;
    double forward_step = 0.25;
    /// Base radius plus a safety margin, for checking a forward move against
    /// mapped obstacles.
    double body_radius = 0.25;
  };

  NavSkill(ClassId target, TargetKind kind);
  NavSkill(ClassId target, TargetKind kind, Config cfg);

  void begin() override;
  world::Action act(const Observation& obs) override;

  const OccupancyGrid& grid() const { return grid_; }
  const std::optional<Vec2>& target() const { return target_; }

 private:
  world::Action follow(const std::vector<Vec2>& path, const Pose2& pose,
                       const std::vector<std::uint8_t>& blocked);
  /// Nearest mapped obstacle overlapping the base after one forward step.
  std::optional<Vec2> forward_obstacle(const Pose2& pose) const;
  bool line_clear(Vec2 a, Vec2 b, const std::vector<std::uint8_t>& blocked) const;
  world::Action turn_towards(Vec2 p, const Pose2& pose) const;
  bool near_failed_stop(Vec2 p) const;

  ClassId target_class_;
  TargetKind kind_;
  Config cfg_;
  OccupancyGrid grid_;
  bool grid_ready_ = false;
  std::optional<Vec2> target_;
  std::optional<Vec2> candidate_;
  std::optional<Vec2> rejected_;
  int invocations_ = 0;
  int spin_remaining_ = 0;
  /// Turn direction (+1 left, -1 right) held until a forward step is clear.
  int sidestep_ = 0;
  int sidestep_turns_ = 0;
  bool bumped_ = false;
  int bumps_near_target_ = 0;
  int returns_to_target_ = 0;
  std::optional<Vec2> last_stop_;
  std::vector<Vec2> failed_stops_;
};

/// Rotates and creeps with continuous base motion until the goal object is
/// centered and in reach, then issues Snap and Stop.
class GazeSkill : public Skill {
 public:
  struct Config {
    double center_tolerance = deg_to_rad(3.0);
    double snap_distance = 0.8;
    int search_limit = 36;
    int step_limit = 80;
  };

  explicit GazeSkill(ClassId goal_object);
  GazeSkill(ClassId goal_object, Config cfg);

  void begin() override;
  world::Action act(const Observation& obs) override;

 private:
  ClassId goal_;
  Config cfg_;
  bool snapped_ = false;
  int search_steps_ = 0;
  int steps_ = 0;
  int collisions_ = 0;
};

/// Faces the nearest goal-receptacle edge, drives up to it, raises the arm
/// just above the estimated surface, reaches over the edge, releases,
/// retracts and stops.
class PlaceSkill : public Skill {
 public:
  struct Config {
    double agent_radius = 0.2;
    double stand_off = 0.3;
    double overhang = 0.15;
    double lift_margin = 0.05;
    double center_tolerance = deg_to_rad(3.0);
    double center_band = deg_to_rad(6.0);
    int search_limit = 36;
    int approach_limit = 40;
    int settle_wait = 5;
  };

  explicit PlaceSkill(ClassId goal_receptacle);
  PlaceSkill(ClassId goal_receptacle, Config cfg);

  void begin() override;
  world::Action act(const Observation& obs) override;

 private:
  enum class Stage { Search, Align, Approach, Raise, Extend, Retract, Finished };

  ClassId goal_;
  Config cfg_;
  Stage stage_ = Stage::Search;
  int search_steps_ = 0;
  int approach_steps_ = 0;
  int wait_steps_ = 0;
  double surface_height_ = 0.0;
  double edge_distance_ = 0.0;
};

/// Replays recorded actions: each invocation consumes the next recorded
/// action sequence, then emits Stop.
class ReplaySkill : public Skill {
 public:
  explicit ReplaySkill(std::vector<std::vector<world::Action>> invocations);

  void begin() override;
  world::Action act(const Observation& obs) override;

 private:
  std::deque<std::vector<world::Action>> pending_;
  std::vector<world::Action> current_;
  std::size_t cursor_ = 0;
};

}  // namespace ovmm::agent
