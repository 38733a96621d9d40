#include "ovmm/agent/scripted.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace ovmm::agent {

using world::Action;
namespace act = world::action;

TargetView find_target(const Observation& obs, ClassId cls, double cluster_tolerance,
                       double max_bearing) {
  TargetView v;
  const world::Frame& frame = *obs.frame;
  const perception::LabelMap& labels = *obs.labels;
  const world::CameraConfig& cam = *obs.camera;

  auto usable = [&](std::size_t i) {
    if (labels.classes[i] != cls || frame.class_map[i] == classes::kRobot) return false;
    return std::abs(cam.column_azimuth(static_cast<int>(i) % frame.width)) <= max_bearing;
  };

  double min_depth = std::numeric_limits<double>::infinity();
  std::size_t nearest = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (usable(i) && frame.depth_map[i] < min_depth) {
      min_depth = frame.depth_map[i];
      nearest = i;
    }
  }
  if (!std::isfinite(min_depth)) return v;

  auto project = [&](std::size_t i) {
    const double az = obs.pose.theta + cam.column_azimuth(static_cast<int>(i) % frame.width);
    return obs.pose.position() + static_cast<double>(frame.depth_map[i]) * heading_vector(az);
  };

  auto in_cluster = [&](std::size_t i) {
    return usable(i) && frame.depth_map[i] <= min_depth + cluster_tolerance;
  };
  // Two neighbouring objects at the same depth only count as one target when
  // their columns touch, otherwise the centroid would fall between them.
  std::vector<char> occupied(static_cast<std::size_t>(frame.width), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (in_cluster(i)) occupied[i % static_cast<std::size_t>(frame.width)] = 1;
  }
  constexpr int kMaxGap = 2;
  const int seed_col = static_cast<int>(nearest) % frame.width;
  int lo = seed_col;
  int hi = seed_col;
  for (int c = seed_col - 1, gap = 0; c >= 0 && gap <= kMaxGap; --c) {
    gap = occupied[static_cast<std::size_t>(c)] ? 0 : gap + 1;
    if (gap == 0) lo = c;
  }
  for (int c = seed_col + 1, gap = 0; c < frame.width && gap <= kMaxGap; ++c) {
    gap = occupied[static_cast<std::size_t>(c)] ? 0 : gap + 1;
    if (gap == 0) hi = c;
  }

  v.visible = true;
  v.min_depth = min_depth;
  v.nearest_point = project(nearest);
  v.max_height = -std::numeric_limits<double>::infinity();
  Vec2 sum;
  double az_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int col = static_cast<int>(i) % frame.width;
    if (!in_cluster(i) || col < lo || col > hi) continue;
    const int row = static_cast<int>(i) / frame.width;
    sum = sum + project(i);
    az_sum += cam.column_azimuth(static_cast<int>(i) % frame.width);
    v.max_height = std::max(v.max_height, cam.mount_height + static_cast<double>(frame.depth_map[i]) *
                                                                  std::tan(cam.row_elevation(row)));
    ++v.pixels;
  }
  v.cluster_center = (1.0 / v.pixels) * sum;
  v.bearing = az_sum / v.pixels;
  return v;
}

// ---------------------------------------------------------------------------

NavSkill::NavSkill(ClassId target, TargetKind kind) : NavSkill(target, kind, Config{}) {}

NavSkill::NavSkill(ClassId target, TargetKind kind, Config cfg)
    : target_class_(target), kind_(kind), cfg_(cfg) {}

void NavSkill::begin() {
  // Being handed control again means the previous goal did not pan out.
  if (invocations_++ > 0 && target_) {
    if (last_stop_) failed_stops_.push_back(*last_stop_);
    if (++returns_to_target_ >= cfg_.max_returns) {
      rejected_ = target_;
      target_.reset();
      returns_to_target_ = 0;
      failed_stops_.clear();
    }
  }
  last_stop_.reset();
  candidate_.reset();
  sidestep_ = 0;
  bumps_near_target_ = 0;
  spin_remaining_ = cfg_.initial_spin;
}

bool NavSkill::near_failed_stop(Vec2 p) const {
  for (const Vec2& s : failed_stops_) {
    if (distance(p, s) < cfg_.fresh_standpoint) return true;
  }
  return false;
}

Action NavSkill::turn_towards(Vec2 p, const Pose2& pose) const {
  const Vec2 rel = p - pose.position();
  const double bearing = wrap_angle(std::atan2(rel.y, rel.x) - pose.theta);
  return bearing > 0.0 ? Action{act::TurnLeft{}} : Action{act::TurnRight{}};
}

bool NavSkill::line_clear(Vec2 a, Vec2 b, const std::vector<std::uint8_t>& blocked) const {
  const double len = distance(a, b);
  const double step = 0.5 * grid_.resolution();
  for (double t = 0.0; t <= len; t += step) {
    const GridCell c = grid_.cell_of(a + (t / std::max(len, 1e-9)) * (b - a));
    if (grid_.in_grid(c) && blocked[static_cast<std::size_t>(c.row * grid_.cols() + c.col)]) return false;
  }
  return true;
}

std::optional<Vec2> NavSkill::forward_obstacle(const Pose2& pose) const {
  const Vec2 end = pose.position() + cfg_.forward_step * heading_vector(pose.theta);
  const GridCell mid = grid_.cell_of(end);
  const int r = static_cast<int>(std::ceil(cfg_.body_radius / grid_.resolution()));
  std::optional<Vec2> nearest;
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      const GridCell c{mid.row + dr, mid.col + dc};
      if (!grid_.in_grid(c) || grid_.at(c) != OccupancyGrid::Cell::Occupied) continue;
      const Vec2 p = grid_.center_of(c);
      if (distance(p, end) > cfg_.body_radius) continue;
      if (!nearest || distance(p, end) < distance(*nearest, end)) nearest = p;
    }
  }
  return nearest;
}

Action NavSkill::follow(const std::vector<Vec2>& path, const Pose2& pose,
                        const std::vector<std::uint8_t>& blocked) {
  // Aim at the farthest path point reachable in a straight line, so that
  // equal-cost staircase variants of the same route steer the same way.
  Vec2 waypoint = path.back();
  for (std::size_t i = path.size(); i-- > 1;) {
    if (line_clear(pose.position(), path[i], blocked)) {
      waypoint = path[i];
      break;
    }
  }
  const Vec2 rel = waypoint - pose.position();
  const double bearing = wrap_angle(std::atan2(rel.y, rel.x) - pose.theta);
  const auto obstacle = forward_obstacle(pose);
  if (sidestep_ != 0) {
    // Keep turning the same way until the step ahead is clear, then take it.
    if (!obstacle || ++sidestep_turns_ > 12) {
      sidestep_ = 0;
      if (!obstacle) return act::Forward{};
    } else {
      return sidestep_ > 0 ? Action{act::TurnLeft{}} : Action{act::TurnRight{}};
    }
  }
  if (std::abs(bearing) > cfg_.turn_threshold) {
    return bearing > 0.0 ? Action{act::TurnLeft{}} : Action{act::TurnRight{}};
  }
  if (!bumped_ || !obstacle) return act::Forward{};
  // The last forward step hit something: turn away from it and take one
  // step before steering back.
  const Vec2 away = *obstacle - pose.position();
  sidestep_ = heading_vector(pose.theta).cross(away) > 0.0 ? -1 : 1;
  sidestep_turns_ = 0;
  return sidestep_ > 0 ? Action{act::TurnLeft{}} : Action{act::TurnRight{}};
}

Action NavSkill::act(const Observation& obs) {
  if (!grid_ready_) {
    grid_ = OccupancyGrid(obs.map_bounds, cfg_.grid_resolution);
    grid_ready_ = true;
  }
  const Pose2& pose = obs.pose;
  bumped_ = obs.collided;
  if (obs.collided) grid_.mark_occupied(pose.position() + 0.3 * heading_vector(pose.theta));
  grid_.integrate(*obs.frame, *obs.camera, pose);

  const TargetView tv = find_target(obs, target_class_, 0.3);
  std::optional<Vec2> seen;
  if (tv.visible) seen = kind_ == TargetKind::Object ? tv.cluster_center : tv.nearest_point;
  if (seen && rejected_ && distance(*seen, *rejected_) < cfg_.reject_radius) seen.reset();
  // A sighting only counts once the previous frame saw the same spot.
  if (seen && candidate_ && distance(*seen, *candidate_) <= cfg_.confirm_radius) {
    if (!target_ || distance(*target_, *seen) > cfg_.reject_radius) returns_to_target_ = 0;
    if (!target_ || distance(*target_, *seen) > cfg_.target_hysteresis) target_ = seen;
  }
  candidate_ = seen;

  if (target_) {
    const Vec2 rel = *target_ - pose.position();
    if (obs.collided && rel.norm() <= cfg_.blocked_stop_radius) ++bumps_near_target_;
    const double reach = bumps_near_target_ >= 2 ? cfg_.blocked_stop_radius : cfg_.stop_radius;
    if (rel.norm() <= reach && !near_failed_stop(pose.position())) {
      const double bearing = wrap_angle(std::atan2(rel.y, rel.x) - pose.theta);
      if (std::abs(bearing) <= cfg_.stop_bearing) {
        last_stop_ = pose.position();
        return act::Stop{};
      }
      return turn_towards(*target_, pose);
    }
  }
  if (spin_remaining_ > 0 && !target_) {
    --spin_remaining_;
    return act::TurnLeft{};
  }

  const GridCell here = grid_.cell_of(pose.position());
  auto blocked_with = [&](double inflation) {
    auto blocked = grid_.blocked_mask(inflation);
    // The agent's own disc must stay plannable even when it hugs an obstacle.
    const int r = static_cast<int>(std::ceil(0.2 / grid_.resolution()));
    for (int dr = -r; dr <= r; ++dr) {
      for (int dc = -r; dc <= r; ++dc) {
        const GridCell c{here.row + dr, here.col + dc};
        if (grid_.in_grid(c) && grid_.at(c) != OccupancyGrid::Cell::Occupied) {
          blocked[static_cast<std::size_t>(c.row * grid_.cols() + c.col)] = 0;
        }
      }
    }
    return blocked;
  };
  const auto roomy = blocked_with(cfg_.inflation);
  // Squeezing past obstacles is a last resort for when the agent has worked
  // itself into a gap that the normal margin seals off.
  const auto tight = blocked_with(cfg_.tight_inflation);

  // An unconfirmed sighting is worth steering towards, but not committing to.
  if (const auto aim = target_ ? target_ : seen) {
    const Vec2 goal = *aim;
    const double radius = cfg_.approach_radius;
    auto is_goal = [&](GridCell c) {
      const Vec2 p = grid_.center_of(c);
      return distance(p, goal) <= radius && !near_failed_stop(p);
    };
    for (const auto* blocked : {&roomy, &tight}) {
      auto path = grid_.plan(pose.position(), is_goal, *blocked);
      if (path && path->size() > 1) return follow(*path, pose, *blocked);
      if (path) return turn_towards(goal, pose);
    }
    if (!failed_stops_.empty()) {
      failed_stops_.clear();
      return turn_towards(goal, pose);
    }
    target_.reset();
  }

  const Vec2 start = pose.position();
  auto is_frontier = [&](GridCell c) {
    return grid_.is_frontier(c) && distance(grid_.center_of(c), start) >= 0.5;
  };
  for (const auto* blocked : {&roomy, &tight}) {
    auto path = grid_.plan(start, is_frontier, *blocked);
    if (path && path->size() > 1) return follow(*path, pose, *blocked);
  }
  return act::TurnLeft{};
}

// ---------------------------------------------------------------------------

GazeSkill::GazeSkill(ClassId goal_object) : GazeSkill(goal_object, Config{}) {}
GazeSkill::GazeSkill(ClassId goal_object, Config cfg) : goal_(goal_object), cfg_(cfg) {}

void GazeSkill::begin() {
  snapped_ = false;
  search_steps_ = 0;
  steps_ = 0;
  collisions_ = 0;
}

Action GazeSkill::act(const Observation& obs) {
  ++steps_;
  if (snapped_ || obs.holding || steps_ > cfg_.step_limit) return act::Stop{};
  if (obs.collided) ++collisions_;

  const TargetView tv = find_target(obs, goal_, 0.25);
  if (!tv.visible) {
    if (search_steps_++ >= cfg_.search_limit) return act::Stop{};
    return act::Manip{0.0, deg_to_rad(10.0), 0.0, 0.0};
  }
  if (std::abs(tv.bearing) > cfg_.center_tolerance) return act::Manip{0.0, tv.bearing, 0.0, 0.0};
  if (tv.min_depth > cfg_.snap_distance && collisions_ < 2) {
    return act::Manip{std::min(0.1, tv.min_depth - 0.7), 0.0, 0.0, 0.0};
  }
  snapped_ = true;
  return act::Snap{};
}

// ---------------------------------------------------------------------------

PlaceSkill::PlaceSkill(ClassId goal_receptacle) : PlaceSkill(goal_receptacle, Config{}) {}
PlaceSkill::PlaceSkill(ClassId goal_receptacle, Config cfg) : goal_(goal_receptacle), cfg_(cfg) {}

void PlaceSkill::begin() {
  stage_ = Stage::Search;
  search_steps_ = 0;
  approach_steps_ = 0;
  wait_steps_ = 0;
}

Action PlaceSkill::act(const Observation& obs) {
  const act::Manip search_turn{0.0, deg_to_rad(10.0), 0.0, 0.0};
  switch (stage_) {
    case Stage::Search:
    case Stage::Align: {
      const TargetView tv = find_target(obs, goal_, 0.15);
      if (!tv.visible) {
        stage_ = Stage::Search;
        if (search_steps_++ >= cfg_.search_limit) {
          stage_ = Stage::Finished;
          return act::Stop{};
        }
        return search_turn;
      }
      if (std::abs(tv.bearing) > cfg_.center_tolerance) {
        stage_ = Stage::Align;
        return act::Manip{0.0, tv.bearing, 0.0, 0.0};
      }
      stage_ = Stage::Approach;
      [[fallthrough]];
    }
    case Stage::Approach: {
      const TargetView tv = find_target(obs, goal_, 0.15, cfg_.center_band);
      if (!tv.visible) {
        stage_ = Stage::Search;
        return search_turn;
      }
      if (tv.min_depth > cfg_.stand_off + 0.02 && !obs.collided && approach_steps_++ < cfg_.approach_limit) {
        return act::Manip{std::min(0.1, tv.min_depth - cfg_.stand_off), 0.0, 0.0, 0.0};
      }
      surface_height_ = tv.max_height;
      edge_distance_ = tv.min_depth;
      stage_ = Stage::Raise;
      [[fallthrough]];
    }
    case Stage::Raise: {
      const double target = surface_height_ + cfg_.lift_margin;
      if (std::abs(obs.arm_lift - target) > 0.005) return act::Manip{0.0, 0.0, 0.0, target - obs.arm_lift};
      stage_ = Stage::Extend;
      [[fallthrough]];
    }
    case Stage::Extend: {
      const double target = std::clamp(edge_distance_ - cfg_.agent_radius + cfg_.overhang, 0.0, 0.8);
      if (obs.arm_extension < target - 0.005) {
        return act::Manip{0.0, 0.0, target - obs.arm_extension, 0.0};
      }
      stage_ = Stage::Retract;
      if (obs.holding) return act::Release{};
      [[fallthrough]];
    }
    case Stage::Retract:
      if (obs.arm_extension > 0.005) return act::Manip{0.0, 0.0, -obs.arm_extension, 0.0};
      if (wait_steps_++ < cfg_.settle_wait) return act::Manip{};
      stage_ = Stage::Finished;
      [[fallthrough]];
    case Stage::Finished:
      break;
  }
  return act::Stop{};
}

// ---------------------------------------------------------------------------

ReplaySkill::ReplaySkill(std::vector<std::vector<world::Action>> invocations)
    : pending_(invocations.begin(), invocations.end()) {}

void ReplaySkill::begin() {
  current_.clear();
  cursor_ = 0;
  if (!pending_.empty()) {
    current_ = std::move(pending_.front());
    pending_.pop_front();
  }
}

Action ReplaySkill::act(const Observation&) {
  if (cursor_ < current_.size()) return current_[cursor_++];
  return act::Stop{};
}

}  // namespace ovmm::agent
