#include "ovmm/world/render.hpp"

#include <cmath>
#include <limits>

namespace ovmm::world {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BoxSpan {
  double t_in;
  double t_out;
  double z0;
  double z1;
  ClassId class_id;
  std::int32_t instance;
};

// Horizontal parameter interval where a 2-D ray lies inside a rectangle.
bool slab_2d(Vec2 o, Vec2 d, const Rect& r, double& t_in, double& t_out) {
  t_in = -kInf;
  t_out = kInf;
  const double orig[2] = {o.x, o.y};
  const double dir[2] = {d.x, d.y};
  const double lo[2] = {r.min_x, r.min_y};
  const double hi[2] = {r.max_x, r.max_y};
  for (int k = 0; k < 2; ++k) {
    if (std::abs(dir[k]) < 1e-15) {
      if (orig[k] < lo[k] || orig[k] > hi[k]) return false;
      continue;
    }
    double t1 = (lo[k] - orig[k]) / dir[k];
    double t2 = (hi[k] - orig[k]) / dir[k];
    if (t1 > t2) std::swap(t1, t2);
    t_in = std::max(t_in, t1);
    t_out = std::min(t_out, t2);
  }
  t_in = std::max(t_in, 0.0);
  return t_out >= t_in;
}

double ray_segment(Vec2 o, Vec2 d, const Segment& s) {
  const Vec2 e = s.b - s.a;
  const double denom = d.cross(e);
  if (std::abs(denom) < 1e-15) return kInf;
  const Vec2 w = s.a - o;
  const double t = w.cross(e) / denom;
  const double u = w.cross(d) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return kInf;
  return t;
}

// Everything a single azimuth needs before looping over elevations.
class ColumnCaster {
 public:
  ColumnCaster(const Scene& scene, const AgentState& agent, const CameraConfig& cam, double azimuth)
      : cam_(cam) {
    const Vec2 o = agent.base.position();
    const Vec2 d = heading_vector(azimuth);
    for (const auto& w : scene.walls) wall_t_ = std::min(wall_t_, ray_segment(o, d, w));
    double t_in = 0.0;
    double t_out = 0.0;
    for (const auto& r : scene.receptacles) {
      if (slab_2d(o, d, r.footprint, t_in, t_out) && t_in < wall_t_) {
        spans_.push_back({t_in, t_out, 0.0, r.surface_height, r.class_id, r.id});
      }
    }
    for (const auto& obj : scene.objects) {
      if (agent.gripper_holding == obj.id) continue;
      if (slab_2d(o, d, obj.footprint(), t_in, t_out) && t_in < wall_t_) {
        spans_.push_back(
            {t_in, t_out, obj.position.z, obj.position.z + obj.size, obj.class_id, obj.id});
      }
    }
  }

  RayHit cast(double elevation) const {
    const double tan_e = std::tan(elevation);
    const double h = cam_.mount_height;
    RayHit hit{classes::kBackground, 0, kInf};
    for (const auto& s : spans_) {
      double t_hit;
      if (tan_e == 0.0) {
        if (h < s.z0 || h > s.z1) continue;
        t_hit = s.t_in;
      } else {
        const double ta = (s.z0 - h) / tan_e;
        const double tb = (s.z1 - h) / tan_e;
        t_hit = std::max(s.t_in, std::min(ta, tb));
        if (t_hit > std::min(s.t_out, std::max(ta, tb))) continue;
      }
      if (t_hit < hit.range) hit = {s.class_id, s.instance, t_hit};
    }
    // Walls are unbounded in height but a downward ray meets the floor first.
    const double floor_t = tan_e < 0.0 ? h / -tan_e : kInf;
    if (wall_t_ <= floor_t && wall_t_ < hit.range) hit = {classes::kWall, 0, wall_t_};
    if (hit.range > cam_.max_range) hit = {classes::kBackground, 0, cam_.max_range};
    return hit;
  }

 private:
  const CameraConfig& cam_;
  double wall_t_ = kInf;
  std::vector<BoxSpan> spans_;
};

float quantize_depth(double range, const CameraConfig& cam) {
  const double q = cam.depth_quantum;
  const double v = q > 0.0 ? std::round(range / q) * q : range;
  return static_cast<float>(std::clamp(v, q > 0.0 ? q : 1e-6, cam.max_range));
}

}  // namespace

double arm_blocked_fraction(double arm_extension, const CameraConfig& cam) {
  if (arm_extension <= cam.occlusion_onset) return 0.0;
  const double span = cam.full_extension - cam.occlusion_onset;
  const double f = span > 0.0 ? (arm_extension - cam.occlusion_onset) / span : 1.0;
  return cam.max_blocked_fraction * std::clamp(f, 0.0, 1.0);
}

Frame render(const Scene& scene, const AgentState& agent, const CameraConfig& cam) {
  Frame f;
  f.width = cam.width;
  f.height = cam.height;
  const auto n = static_cast<std::size_t>(cam.width) * static_cast<std::size_t>(cam.height);
  f.class_map.assign(n, classes::kBackground);
  f.instance_map.assign(n, 0);
  f.depth_map.assign(n, static_cast<float>(cam.max_range));

  const int blocked_rows = static_cast<int>(
      std::lround(arm_blocked_fraction(agent.arm_extension, cam) * cam.height));
  const int visible_rows = cam.height - blocked_rows;
  f.blocked_fraction = static_cast<double>(blocked_rows) / cam.height;

  std::vector<double> elevations(static_cast<std::size_t>(cam.height));
  for (int r = 0; r < cam.height; ++r) elevations[static_cast<std::size_t>(r)] = cam.row_elevation(r);

  for (int c = 0; c < cam.width; ++c) {
    const ColumnCaster caster(scene, agent, cam, agent.base.theta + cam.column_azimuth(c));
    for (int r = 0; r < visible_rows; ++r) {
      const RayHit hit = caster.cast(elevations[static_cast<std::size_t>(r)]);
      const auto i = f.index(r, c);
      f.class_map[i] = hit.class_id;
      f.instance_map[i] = hit.instance;
      f.depth_map[i] = quantize_depth(hit.range, cam);
    }
    for (int r = visible_rows; r < cam.height; ++r) {
      const auto i = f.index(r, c);
      f.class_map[i] = classes::kRobot;
      f.depth_map[i] = quantize_depth(cam.arm_depth, cam);
    }
  }
  return f;
}

RayHit cast_ray(const Scene& scene, const AgentState& agent, const CameraConfig& cam,
                double azimuth, double elevation) {
  return ColumnCaster(scene, agent, cam, azimuth).cast(elevation);
}

}  // namespace ovmm::world
