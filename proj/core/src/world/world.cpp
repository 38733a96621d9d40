#include "ovmm/world/world.hpp"

#include <algorithm>
#include <cmath>

#include "ovmm/world/render.hpp"

namespace ovmm::world {

Vec2 gripper_xy(const AgentState& agent, const WorldConfig& cfg) {
  return agent.base.position() +
         (cfg.agent_radius + agent.arm_extension) * heading_vector(agent.base.theta);
}

Vec3 gripper_position(const AgentState& agent, const WorldConfig& cfg) {
  const Vec2 g = gripper_xy(agent, cfg);
  return {g.x, g.y, agent.arm_lift};
}

std::string_view action_name(const Action& a) {
  struct Namer {
    std::string_view operator()(const action::Forward&) const { return "forward"; }
    std::string_view operator()(const action::TurnLeft&) const { return "turn_left"; }
    std::string_view operator()(const action::TurnRight&) const { return "turn_right"; }
    std::string_view operator()(const action::Manip&) const { return "manip"; }
    std::string_view operator()(const action::Snap&) const { return "snap"; }
    std::string_view operator()(const action::Release&) const { return "release"; }
    std::string_view operator()(const action::Stop&) const { return "stop"; }
  };
  return std::visit(Namer{}, a);
}

std::string_view event_name(Event e) {
  switch (e) {
    case Event::Collision: return "collision";
    case Event::PickSuccess: return "pick_success";
    case Event::PickFail: return "pick_fail";
    case Event::Released: return "released";
    case Event::ContactDrop: return "contact_drop";
    case Event::OffSurfaceDrop: return "off_surface_drop";
    case Event::OnSurface: return "on_surface";
  }
  return "unknown";
}

bool base_blocked(const Scene& scene, Vec2 p, double radius) { return !is_free(scene, p, radius); }

PlacementOutcome settle_object(const Scene& scene, const AgentState& agent, const WorldConfig& cfg) {
  if (!agent.gripper_holding) throw InvalidAction("settle_object: agent is not holding an object");
  PlacementOutcome out;
  out.object_id = *agent.gripper_holding;
  const Vec3 g = gripper_position(agent, cfg);

  const ReceptacleInstance* landing = nullptr;
  for (const auto& r : scene.receptacles) {
    if (r.footprint.contains(g.xy()) && g.z >= r.surface_height) {
      landing = &r;
      break;
    }
  }
  double z = 0.0;
  if (landing != nullptr) {
    out.contact_receptacle = landing->id;
    z = landing->surface_height;
  }
  out.drop_height = std::max(0.0, g.z - z);

  const Vec2 dir = heading_vector(agent.base.theta);
  Vec2 pos = g.xy();
  double v = cfg.impact_gain * out.drop_height;
  int below = 0;
  out.speeds.reserve(static_cast<std::size_t>(cfg.settle_steps));
  for (int t = 0; t < cfg.settle_steps; ++t) {
    out.speeds.push_back(v);
    if (!out.stable) {
      below = v < cfg.v_stable ? below + 1 : 0;
      if (below >= cfg.k_stable) {
        out.stable = true;
      } else {
        pos = pos + v * dir;
        if (landing != nullptr && !out.roll_off_step && !landing->footprint.contains(pos)) {
          out.roll_off_step = t;
          z = 0.0;
        }
      }
    }
    v *= cfg.damping;
  }
  out.support = (landing != nullptr && !out.roll_off_step) ? Support::on(landing->id) : Support::floor();
  out.final_position = {pos.x, pos.y, z};
  return out;
}

namespace {

void translate(const Scene& scene, AgentState& agent, double dist, const WorldConfig& cfg,
               EventList& events) {
  if (dist == 0.0) return;
  const Vec2 start = agent.base.position();
  const Vec2 dir = heading_vector(agent.base.theta);
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(dist) / 0.05)));
  for (int i = 1; i <= n; ++i) {
    const Vec2 p = start + (dist * i / n) * dir;
    if (base_blocked(scene, p, cfg.agent_radius)) {
      events.push_back(Event::Collision);
      return;
    }
  }
  const Vec2 end = start + dist * dir;
  agent.base.x = end.x;
  agent.base.y = end.y;
}

// True when some part of the object is visible from the camera: rays to a
// few points on its near face, at mid and upper height.
bool in_line_of_sight(const Scene& scene, const AgentState& agent, const CameraConfig& cam,
                      const ObjectInstance& obj) {
  const Vec2 base = agent.base.position();
  const Vec2 rel = obj.position.xy() - base;
  const Vec2 side = (0.35 * obj.size / std::max(rel.norm(), 1e-9)) * Vec2{-rel.y, rel.x};
  for (double lateral : {0.0, -1.0, 1.0}) {
    const Vec2 p = rel + lateral * side;
    const double azimuth = std::atan2(p.y, p.x);
    for (double h : {0.5, 0.85}) {
      const double elevation = std::atan2(obj.position.z + h * obj.size - cam.mount_height, p.norm());
      if (cast_ray(scene, agent, cam, azimuth, elevation).instance == obj.id) return true;
    }
  }
  return false;
}

void snap(Scene& scene, AgentState& agent, const StepContext& ctx, Rng& rng, EventList& events) {
  const WorldConfig& cfg = *ctx.config;
  const Vec2 base = agent.base.position();
  const ObjectInstance* best = nullptr;
  double best_dist = 0.0;
  for (const auto& obj : scene.objects) {
    if (obj.class_id != ctx.goal_object || obj.resting_on.kind == Support::Kind::Held) continue;
    const Vec2 rel = obj.position.xy() - base;
    const double dist = rel.norm();
    const double azimuth = std::atan2(rel.y, rel.x);
    if (dist > cfg.snap_range || std::abs(wrap_angle(azimuth - agent.base.theta)) > cfg.snap_cone) {
      continue;
    }
    if (ctx.camera != nullptr && !in_line_of_sight(scene, agent, *ctx.camera, obj)) continue;
    if (best == nullptr || dist < best_dist) {
      best = &obj;
      best_dist = dist;
    }
  }
  if (best == nullptr || (cfg.snap_failure_prob > 0.0 && rng.bernoulli(cfg.snap_failure_prob))) {
    events.push_back(Event::PickFail);
    return;
  }
  ObjectInstance* obj = scene.find_object(best->id);
  obj->resting_on = Support::held();
  obj->speed = 0.0;
  agent.gripper_holding = obj->id;
  events.push_back(Event::PickSuccess);
}

}  // namespace

StepResult step_world(Scene& scene, const AgentState& agent, const Action& a,
                      const StepContext& ctx, Rng& rng) {
  const WorldConfig& cfg = *ctx.config;
  StepResult res{agent, {}, std::nullopt};
  AgentState& next = res.agent;

  if (std::holds_alternative<action::Forward>(a)) {
    translate(scene, next, cfg.forward_step, cfg, res.events);
  } else if (std::holds_alternative<action::TurnLeft>(a)) {
    next.base.theta = wrap_angle(next.base.theta + cfg.turn_step);
  } else if (std::holds_alternative<action::TurnRight>(a)) {
    next.base.theta = wrap_angle(next.base.theta - cfg.turn_step);
  } else if (const auto* m = std::get_if<action::Manip>(&a)) {
    translate(scene, next, std::clamp(m->d_base, -cfg.max_manip_base, cfg.max_manip_base), cfg,
              res.events);
    next.base.theta = wrap_angle(
        next.base.theta + std::clamp(m->d_theta, -cfg.max_manip_theta, cfg.max_manip_theta));
    next.arm_extension = std::clamp(
        next.arm_extension + std::clamp(m->d_ext, -cfg.max_manip_extension, cfg.max_manip_extension),
        0.0, cfg.max_arm_extension);
    next.arm_lift = std::clamp(
        next.arm_lift + std::clamp(m->d_lift, -cfg.max_manip_lift, cfg.max_manip_lift), 0.0,
        cfg.max_arm_lift);
  } else if (std::holds_alternative<action::Snap>(a)) {
    if (next.gripper_holding) throw InvalidAction("Snap issued while already holding an object");
    snap(scene, next, ctx, rng, res.events);
  } else if (std::holds_alternative<action::Release>(a)) {
    if (!next.gripper_holding) throw InvalidAction("Release issued with an empty gripper");
    PlacementOutcome out = settle_object(scene, next, cfg);
    ObjectInstance* obj = scene.find_object(out.object_id);
    obj->position = out.final_position;
    obj->resting_on = out.support;
    obj->speed = out.speeds.empty() ? 0.0 : out.speeds.back();
    next.gripper_holding.reset();
    res.events.push_back(Event::Released);
    const ReceptacleInstance* hit =
        out.contact_receptacle ? scene.find_receptacle(*out.contact_receptacle) : nullptr;
    const bool on_goal = hit != nullptr && hit->class_id == ctx.goal_receptacle;
    res.events.push_back(on_goal ? Event::ContactDrop : Event::OffSurfaceDrop);
    if (on_goal && out.on_surface_at(0)) res.events.push_back(Event::OnSurface);
    res.placement = std::move(out);
  }

  if (next.gripper_holding) {
    if (ObjectInstance* held = scene.find_object(*next.gripper_holding)) {
      held->position = gripper_position(next, cfg);
    }
  }
  return res;
}

}  // namespace ovmm::world
