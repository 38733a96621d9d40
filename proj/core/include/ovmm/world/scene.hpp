#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ovmm/common/class_id.hpp"
#include "ovmm/common/geometry.hpp"

namespace ovmm::world {

struct ReceptacleInstance {
  int id = 0;
  ClassId class_id;
  Rect footprint;
  double surface_height = 0.0;

  friend bool operator==(const ReceptacleInstance&, const ReceptacleInstance&) = default;
};

/// Where an object currently rests.
struct Support {
  enum class Kind : std::uint8_t { Floor, Receptacle, Held };
  Kind kind = Kind::Floor;
  int receptacle_id = 0;  // meaningful for Kind::Receptacle

  static Support floor() { return {Kind::Floor, 0}; }
  static Support held() { return {Kind::Held, 0}; }
  static Support on(int receptacle) { return {Kind::Receptacle, receptacle}; }

  friend bool operator==(const Support&, const Support&) = default;
};

struct ObjectInstance {
  int id = 0;
  ClassId class_id;
  /// Bottom-center of the object's box.
  Vec3 position;
  /// Edge length of the object's cube.
  double size = 0.1;
  double speed = 0.0;
  Support resting_on;

  Rect footprint() const {
    const double h = 0.5 * size;
    return {position.x - h, position.y - h, position.x + h, position.y + h};
  }

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

struct Scene {
  Rect bounds;
  std::vector<Segment> walls;
  /// Centers of doorway gaps in interior walls; kept free of furniture.
  std::vector<Vec2> doors;
  std::vector<ReceptacleInstance> receptacles;
  std::vector<ObjectInstance> objects;
  std::uint64_t rng_seed = 0;

  const ReceptacleInstance* find_receptacle(int id) const;
  const ObjectInstance* find_object(int id) const;
  ObjectInstance* find_object(int id);

  bool has_receptacle_class(ClassId c) const;
  bool has_object_class(ClassId c) const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

struct ReceptacleClassSpec {
  ClassId id;
  std::string name;
  double min_width = 0.5;
  double max_width = 1.2;
  double min_depth = 0.4;
  double max_depth = 0.9;
  double min_height = 0.4;
  double max_height = 0.9;
};

struct ObjectClassSpec {
  ClassId id;
  std::string name;
  double size = 0.1;
};

/// Class inventories and instance-count ranges for procedural scenes.
struct SceneSpec {
  double width = 6.0;
  double depth = 6.0;
  int interior_walls = 1;
  double door_width = 1.2;
  std::vector<ReceptacleClassSpec> receptacle_classes;
  std::vector<ObjectClassSpec> object_classes;
  int min_receptacles = 4;
  int max_receptacles = 7;
  int min_objects = 3;
  int max_objects = 6;
  /// Free gap kept between furniture, walls and doorways.
  double clearance = 0.6;
  int max_retries = 200;
};

/// Default inventory: six furniture classes (ids 10..15) and five
/// graspable object classes (ids 20..24).
SceneSpec default_scene_spec();

/// Human-readable class name from the default inventory, or "class_<id>".
std::string class_name(ClassId c);

class PlacementInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Procedurally builds a scene. Deterministic in (seed, spec).
Scene generate_scene(std::uint64_t seed, const SceneSpec& spec);

/// True when a disc of the given radius at p is inside the bounds and clear of
/// walls and receptacle footprints.
bool is_free(const Scene& scene, Vec2 p, double radius);

}  // namespace ovmm::world
