#include "ovmm/perception/fusion.hpp"

#include <algorithm>
#include <string>

namespace ovmm::perception {

LabelMap LabelMap::empty(int width, int height) {
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  return {width, height, std::vector<ClassId>(n, classes::kBackground),
          std::vector<Provenance>(n, Provenance::None)};
}

namespace {

int task_rank(ClassId c, const TaskClasses& t) {
  if (c == classes::kBackground) return 0;
  if (c == t.goal_object) return 3;
  if (c == t.start_receptacle) return 2;
  if (c == t.goal_receptacle) return 1;
  return 0;
}

}  // namespace

LabelMap compose_priority(const DetectionSet& d, const TaskClasses& task) {
  LabelMap out = LabelMap::empty(d.width, d.height);
  std::vector<const Detection*> order;
  order.reserve(d.detections.size());
  for (const auto& det : d.detections) order.push_back(&det);
  // Lower rank paints first; within a rank, larger masks paint first.
  std::stable_sort(order.begin(), order.end(), [&](const Detection* a, const Detection* b) {
    const int ra = task_rank(a->class_id, task);
    const int rb = task_rank(b->class_id, task);
    if (ra != rb) return ra < rb;
    return a->mask.size() > b->mask.size();
  });
  for (const Detection* det : order) {
    if (det->class_id == classes::kBackground) continue;
    for (auto i : det->mask) {
      out.classes[static_cast<std::size_t>(i)] = det->class_id;
      out.provenance[static_cast<std::size_t>(i)] = d.source;
    }
  }
  return out;
}

LabelMap fuse(const LabelMap& taskspec, const DetectionSet& openvocab, const TaskClasses& task) {
  if (taskspec.width != openvocab.width || taskspec.height != openvocab.height) {
    throw DimensionMismatch("fuse: task-specific map is " + std::to_string(taskspec.width) + "x" +
                            std::to_string(taskspec.height) + ", open-vocabulary detections are " +
                            std::to_string(openvocab.width) + "x" +
                            std::to_string(openvocab.height));
  }
  LabelMap out = taskspec;
  const LabelMap fallback = compose_priority(openvocab, task);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (taskspec.classes[i] == classes::kBackground && fallback.classes[i] != classes::kBackground) {
      out.classes[i] = fallback.classes[i];
      out.provenance[i] = fallback.provenance[i];
    }
  }
  if (task.goal_object == classes::kBackground) return out;
  for (const auto& det : openvocab.detections) {
    if (det.class_id != task.goal_object) continue;
    for (auto px : det.mask) {
      const auto i = static_cast<std::size_t>(px);
      if (task.is_task(taskspec.classes[i])) continue;
      out.classes[i] = task.goal_object;
      out.provenance[i] = openvocab.source;
    }
  }
  return out;
}

LabelMap ground_truth_labels(const world::Frame& frame) {
  LabelMap out = LabelMap::empty(frame.width, frame.height);
  out.classes = frame.class_map;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.classes[i] != classes::kBackground) out.provenance[i] = Provenance::GroundTruth;
  }
  return out;
}

}  // namespace ovmm::perception
