#pragma once

#include <cstdint>
#include <vector>

#include "ovmm/world/scene.hpp"
#include "ovmm/world/world.hpp"

namespace ovmm::world {

/// Egocentric camera. Pixel rays are spaced uniformly in azimuth across the
/// horizontal field of view and uniformly in elevation between the top and
/// bottom limits.
struct CameraConfig {
  int width = 128;
  int height = 64;
  double hfov = deg_to_rad(90.0);
  double elevation_top = deg_to_rad(10.0);
  double elevation_bottom = deg_to_rad(-70.0);
  double mount_height = 1.2;
  double max_range = 10.0;
  double depth_quantum = 0.01;
  double occlusion_onset = 0.3;
  double full_extension = 0.8;
  double max_blocked_fraction = 0.5;
  /// Depth written into arm-occluded pixels.
  double arm_depth = 0.15;

  /// Azimuth offset of column c relative to the optical axis (left positive).
  double column_azimuth(int c) const {
    return 0.5 * hfov - (c + 0.5) * hfov / width;
  }
  double row_elevation(int r) const {
    return elevation_top - (r + 0.5) * (elevation_top - elevation_bottom) / height;
  }
};

struct Frame {
  int width = 0;
  int height = 0;
  std::vector<ClassId> class_map;
  /// 0 for no instance (background, wall, robot).
  std::vector<std::int32_t> instance_map;
  /// Horizontal range to the hit point, quantized.
  std::vector<float> depth_map;
  double blocked_fraction = 0.0;

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(col);
  }
  std::size_t size() const { return class_map.size(); }
};

/// Fraction of the agent's arm extension range that hides the bottom of the
/// image.
double arm_blocked_fraction(double arm_extension, const CameraConfig& cam);

Frame render(const Scene& scene, const AgentState& agent, const CameraConfig& cam);

struct RayHit {
  ClassId class_id = classes::kBackground;
  std::int32_t instance = 0;
  /// Horizontal range; max_range when nothing is hit.
  double range = 0.0;
};

/// Casts one ray from the camera. The held object (if any) is ignored.
RayHit cast_ray(const Scene& scene, const AgentState& agent, const CameraConfig& cam,
                double azimuth, double elevation);

}  // namespace ovmm::world
