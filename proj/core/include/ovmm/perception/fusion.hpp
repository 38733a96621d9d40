#pragma once

#include <stdexcept>
#include <vector>

#include "ovmm/perception/detector.hpp"

namespace ovmm::perception {

/// The three classes an episode prompt makes important. An unset receptacle
/// class is BACKGROUND and never matches a label.
struct TaskClasses {
  ClassId goal_object;
  ClassId start_receptacle;
  ClassId goal_receptacle;

  bool is_task(ClassId c) const {
    return c != classes::kBackground &&
           (c == goal_object || c == start_receptacle || c == goal_receptacle);
  }
};

struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<ClassId> classes;
  std::vector<Provenance> provenance;

  static LabelMap empty(int width, int height);
  std::size_t size() const { return classes.size(); }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Paints detections into a label map. Non-task detections go first, larger
/// masks before smaller; the task classes follow in the order goal
/// receptacle, start receptacle, goal object, so the goal object ends on top.
LabelMap compose_priority(const DetectionSet& detections, const TaskClasses& task);

/// Merges the open-vocabulary detections into the task-specific map:
///  1. start from the task-specific map;
///  2. fill its BACKGROUND pixels from the composited open-vocabulary map;
///  3. paint open-vocabulary goal-object masks over any pixel that the
///     task-specific map did not already assign to a task class.
LabelMap fuse(const LabelMap& taskspec, const DetectionSet& openvocab, const TaskClasses& task);

/// Ground-truth semantic map straight from the renderer.
LabelMap ground_truth_labels(const world::Frame& frame);

}  // namespace ovmm::perception
