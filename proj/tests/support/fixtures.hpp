#pragma once

#include <vector>

#include "ovmm/task/episode.hpp"
#include "ovmm/world/scene.hpp"

namespace ovmm::testing {

/// Rectangular room with its four boundary walls and nothing inside.
inline world::Scene empty_room(double width, double depth) {
  world::Scene s;
  s.bounds = {0.0, 0.0, width, depth};
  s.walls = {
      {{0.0, 0.0}, {width, 0.0}},
      {{width, 0.0}, {width, depth}},
      {{width, depth}, {0.0, depth}},
      {{0.0, depth}, {0.0, 0.0}},
  };
  return s;
}

inline world::ReceptacleInstance& add_receptacle(world::Scene& s, ClassId cls, Rect footprint, double height) {
  const int id = static_cast<int>(s.receptacles.size()) + 1;
  s.receptacles.push_back({id, cls, footprint, height});
  return s.receptacles.back();
}

/// Places an object of the given size centred at (x, y) on top of a receptacle.
inline world::ObjectInstance& add_object_on(world::Scene& s, ClassId cls, int receptacle_id, double x, double y,
                                            double size) {
  const auto* r = s.find_receptacle(receptacle_id);
  const int id = 100 + static_cast<int>(s.objects.size());
  s.objects.push_back({id, cls, {x, y, r->surface_height}, size, 0.0, world::Support::on(receptacle_id)});
  return s.objects.back();
}

inline world::ObjectInstance& add_object_at(world::Scene& s, ClassId cls, Vec3 position, double size) {
  const int id = 100 + static_cast<int>(s.objects.size());
  s.objects.push_back({id, cls, position, size, 0.0, world::Support::floor()});
  return s.objects.back();
}

inline task::Episode make_episode(ClassId object, ClassId start, ClassId goal, Pose2 start_pose, int budget = 2000) {
  task::Episode ep;
  ep.prompt = {object, start, goal};
  ep.agent_start = start_pose;
  ep.step_budget = budget;
  return ep;
}

inline constexpr ClassId kTable{10};
inline constexpr ClassId kCounter{11};
inline constexpr ClassId kCabinet{12};
inline constexpr ClassId kChair{13};
inline constexpr ClassId kCup{20};
inline constexpr ClassId kBook{21};
inline constexpr ClassId kBowl{23};

}  // namespace ovmm::testing
