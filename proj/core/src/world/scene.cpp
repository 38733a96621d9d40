#include "ovmm/world/scene.hpp"

#include <algorithm>

#include "ovmm/common/rng.hpp"

namespace ovmm::world {

const ReceptacleInstance* Scene::find_receptacle(int id) const {
  for (const auto& r : receptacles) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

const ObjectInstance* Scene::find_object(int id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

ObjectInstance* Scene::find_object(int id) {
  for (auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

bool Scene::has_receptacle_class(ClassId c) const {
  return std::any_of(receptacles.begin(), receptacles.end(),
                     [c](const auto& r) { return r.class_id == c; });
}

bool Scene::has_object_class(ClassId c) const {
  return std::any_of(objects.begin(), objects.end(),
                     [c](const auto& o) { return o.class_id == c; });
}

SceneSpec default_scene_spec() {
  SceneSpec spec;
  spec.receptacle_classes = {
      {ClassId{10}, "table", 0.8, 1.3, 0.6, 0.9, 0.70, 0.80},
      {ClassId{11}, "counter", 1.0, 1.6, 0.5, 0.6, 0.85, 0.95},
      {ClassId{12}, "cabinet", 0.5, 0.9, 0.4, 0.5, 0.45, 0.90},
      {ClassId{13}, "chair", 0.45, 0.55, 0.45, 0.55, 0.42, 0.48},
      {ClassId{14}, "shelf", 0.6, 1.0, 0.3, 0.4, 1.00, 1.15},
      {ClassId{15}, "bench", 0.9, 1.4, 0.35, 0.45, 0.40, 0.50},
  };
  spec.object_classes = {
      {ClassId{20}, "cup", 0.08},  {ClassId{21}, "book", 0.14}, {ClassId{22}, "hat", 0.16},
      {ClassId{23}, "bowl", 0.12}, {ClassId{24}, "toy", 0.10},
  };
  return spec;
}

std::string class_name(ClassId c) {
  if (c == classes::kBackground) return "background";
  if (c == classes::kWall) return "wall";
  if (c == classes::kRobot) return "robot";
  static const SceneSpec spec = default_scene_spec();
  for (const auto& r : spec.receptacle_classes) {
    if (r.id == c) return r.name;
  }
  for (const auto& o : spec.object_classes) {
    if (o.id == c) return o.name;
  }
  return "class_" + std::to_string(c.value);
}

namespace {

void add_interior_walls(Scene& scene, const SceneSpec& spec, Rng& rng) {
  const Rect& b = scene.bounds;
  for (int i = 0; i < spec.interior_walls; ++i) {
    const bool vertical = (i % 2) == 0;
    const double lo = vertical ? b.min_x : b.min_y;
    const double span = vertical ? b.width() : b.height();
    const double along_lo = vertical ? b.min_y : b.min_x;
    const double along_span = vertical ? b.height() : b.width();
    const double at = lo + span * rng.uniform(0.35, 0.65);
    const double half_door = 0.5 * spec.door_width;
    const double door =
        along_lo + rng.uniform(half_door + 0.3, along_span - half_door - 0.3);
    auto make = [&](double from, double to) {
      return vertical ? Segment{{at, from}, {at, to}} : Segment{{from, at}, {to, at}};
    };
    scene.walls.push_back(make(along_lo, door - half_door));
    scene.walls.push_back(make(door + half_door, along_lo + along_span));
    scene.doors.push_back(vertical ? Vec2{at, door} : Vec2{door, at});
  }
}

bool receptacle_fits(const Scene& scene, const Rect& fp, double clearance) {
  if (!scene.bounds.inflated(-clearance).contains(fp)) return false;
  const Rect grown = fp.inflated(clearance);
  for (const auto& w : scene.walls) {
    if (segment_intersects_rect(w, grown)) return false;
  }
  for (const auto& d : scene.doors) {
    if (grown.distance_to(d) < clearance) return false;
  }
  for (const auto& r : scene.receptacles) {
    if (r.footprint.inflated(clearance).overlaps(fp)) return false;
  }
  return true;
}

}  // namespace

Scene generate_scene(std::uint64_t seed, const SceneSpec& spec) {
  if (spec.receptacle_classes.empty() || spec.object_classes.empty()) {
    throw PlacementInfeasible("scene spec has an empty class inventory");
  }
  Rng rng(seed);
  Scene scene;
  scene.rng_seed = seed;
  scene.bounds = {0.0, 0.0, spec.width, spec.depth};
  const Rect& b = scene.bounds;
  scene.walls = {
      {{b.min_x, b.min_y}, {b.max_x, b.min_y}},
      {{b.max_x, b.min_y}, {b.max_x, b.max_y}},
      {{b.max_x, b.max_y}, {b.min_x, b.max_y}},
      {{b.min_x, b.max_y}, {b.min_x, b.min_y}},
  };
  add_interior_walls(scene, spec, rng);

  const int n_classes = static_cast<int>(spec.receptacle_classes.size());
  const int n_receptacles = rng.uniform_int(spec.min_receptacles, spec.max_receptacles);
  // The first two instances get distinct classes so every scene can host a
  // prompt with different start and goal receptacle classes.
  const int first_class = rng.uniform_int(0, n_classes - 1);
  const int second_class =
      n_classes > 1 ? (first_class + rng.uniform_int(1, n_classes - 1)) % n_classes : first_class;

  int next_id = 1;
  for (int i = 0; i < n_receptacles; ++i) {
    const int ci = i == 0 ? first_class : i == 1 ? second_class : rng.uniform_int(0, n_classes - 1);
    const auto& cls = spec.receptacle_classes[static_cast<std::size_t>(ci)];
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_retries && !placed; ++attempt) {
      double w = rng.uniform(cls.min_width, cls.max_width);
      double d = rng.uniform(cls.min_depth, cls.max_depth);
      if (rng.bernoulli(0.5)) std::swap(w, d);
      const double cx = rng.uniform(b.min_x + 0.5 * w, b.max_x - 0.5 * w);
      const double cy = rng.uniform(b.min_y + 0.5 * d, b.max_y - 0.5 * d);
      const Rect fp{cx - 0.5 * w, cy - 0.5 * d, cx + 0.5 * w, cy + 0.5 * d};
      if (!receptacle_fits(scene, fp, spec.clearance)) continue;
      scene.receptacles.push_back(
          {next_id++, cls.id, fp, rng.uniform(cls.min_height, cls.max_height)});
      placed = true;
    }
    if (!placed) {
      throw PlacementInfeasible("could not place receptacle " + std::to_string(i) + " after " +
                                std::to_string(spec.max_retries) + " attempts");
    }
  }

  const int n_objects = std::max(1, rng.uniform_int(spec.min_objects, spec.max_objects));
  const int n_obj_classes = static_cast<int>(spec.object_classes.size());
  for (int i = 0; i < n_objects; ++i) {
    const auto& cls =
        spec.object_classes[static_cast<std::size_t>(rng.uniform_int(0, n_obj_classes - 1))];
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_retries && !placed; ++attempt) {
      const auto& rec = scene.receptacles[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(scene.receptacles.size()) - 1))];
      const Rect inner = rec.footprint.inflated(-(0.5 * cls.size + 0.03));
      if (inner.width() <= 0.0 || inner.height() <= 0.0) continue;
      // Objects sit near one edge so they can be reached from that side.
      const double reach = std::min(0.3, std::min(inner.width(), inner.height()));
      double x = rng.uniform(inner.min_x, inner.max_x);
      double y = rng.uniform(inner.min_y, inner.max_y);
      switch (rng.uniform_int(0, 3)) {
        case 0: x = inner.min_x + rng.uniform(0.0, reach); break;
        case 1: x = inner.max_x - rng.uniform(0.0, reach); break;
        case 2: y = inner.min_y + rng.uniform(0.0, reach); break;
        default: y = inner.max_y - rng.uniform(0.0, reach); break;
      }
      ObjectInstance obj{next_id, cls.id, {x, y, rec.surface_height}, cls.size, 0.0,
                         Support::on(rec.id)};
      const bool clash = std::any_of(scene.objects.begin(), scene.objects.end(), [&](const auto& o) {
        return o.footprint().inflated(0.02).overlaps(obj.footprint());
      });
      if (clash) continue;
      ++next_id;
      scene.objects.push_back(obj);
      placed = true;
    }
    if (!placed) {
      throw PlacementInfeasible("could not place object " + std::to_string(i));
    }
  }
  return scene;
}

bool is_free(const Scene& scene, Vec2 p, double radius) {
  if (!scene.bounds.inflated(-radius).contains(p)) return false;
  for (const auto& w : scene.walls) {
    if (w.distance_to(p) < radius) return false;
  }
  for (const auto& r : scene.receptacles) {
    if (r.footprint.distance_to(p) < radius) return false;
  }
  return true;
}

}  // namespace ovmm::world
