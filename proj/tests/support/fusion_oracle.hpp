#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovmm/common/rng.hpp"
#include "ovmm/perception/fusion.hpp"
#include "ovmm/world/render.hpp"

namespace ovmm::testing {

/// Reference compositing decided pixel by pixel: among the detections that
/// cover a pixel, the winner is the one with the highest task priority, then
/// the smallest mask, then the latest in list order.
inline ClassId oracle_composite_pixel(const perception::DetectionSet& d, const perception::TaskClasses& t,
                                      std::int32_t pixel) {
  auto priority = [&](ClassId c) {
    if (c == classes::kBackground) return 0;
    if (c == t.goal_object) return 3;
    if (c == t.start_receptacle) return 2;
    if (c == t.goal_receptacle) return 1;
    return 0;
  };
  const perception::Detection* winner = nullptr;
  for (const auto& det : d.detections) {
    if (det.class_id == classes::kBackground) continue;
    bool covers = false;
    for (auto p : det.mask) covers = covers || p == pixel;
    if (!covers) continue;
    if (winner == nullptr) {
      winner = &det;
      continue;
    }
    const int pw = priority(winner->class_id);
    const int pd = priority(det.class_id);
    if (pd > pw || (pd == pw && det.mask.size() <= winner->mask.size())) winner = &det;
  }
  return winner == nullptr ? classes::kBackground : winner->class_id;
}

struct OraclePixel {
  ClassId cls;
  perception::Provenance provenance;
};

/// The three fusion rules applied independently to one pixel.
inline OraclePixel oracle_fuse_pixel(const perception::LabelMap& ts, const perception::DetectionSet& ov,
                                     const perception::TaskClasses& t, std::int32_t pixel) {
  const auto i = static_cast<std::size_t>(pixel);
  OraclePixel out{ts.classes[i], ts.provenance[i]};
  if (ts.classes[i] == classes::kBackground) {
    const ClassId fill = oracle_composite_pixel(ov, t, pixel);
    if (fill != classes::kBackground) out = {fill, ov.source};
  }
  const bool ts_task = ts.classes[i] != classes::kBackground &&
                       (ts.classes[i] == t.goal_object || ts.classes[i] == t.start_receptacle ||
                        ts.classes[i] == t.goal_receptacle);
  if (!ts_task && t.goal_object != classes::kBackground) {
    for (const auto& det : ov.detections) {
      if (det.class_id != t.goal_object) continue;
      for (auto p : det.mask) {
        if (p == pixel) out = {t.goal_object, ov.source};
      }
    }
  }
  return out;
}

/// Random rectangle as a sorted pixel mask.
inline perception::Mask random_rect_mask(Rng& rng, int width, int height) {
  const int w = rng.uniform_int(1, width / 2);
  const int h = rng.uniform_int(1, height / 2);
  const int c0 = rng.uniform_int(0, width - w);
  const int r0 = rng.uniform_int(0, height - h);
  perception::Mask m;
  for (int r = r0; r < r0 + h; ++r) {
    for (int c = c0; c < c0 + w; ++c) m.push_back(r * width + c);
  }
  return m;
}

inline ClassId random_class(Rng& rng, const std::vector<ClassId>& pool) {
  return pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
}

/// Synthetic ground-truth frame: random instance rectangles painted in order.
inline world::Frame random_frame(Rng& rng, int width, int height, const std::vector<ClassId>& pool) {
  world::Frame f;
  f.width = width;
  f.height = height;
  const auto n = static_cast<std::size_t>(width * height);
  f.class_map.assign(n, classes::kBackground);
  f.instance_map.assign(n, 0);
  f.depth_map.assign(n, 5.0f);
  const int count = rng.uniform_int(0, 6);
  for (int k = 0; k < count; ++k) {
    const ClassId c = random_class(rng, pool);
    for (auto p : random_rect_mask(rng, width, height)) {
      f.class_map[static_cast<std::size_t>(p)] = c;
      f.instance_map[static_cast<std::size_t>(p)] = k + 1;
    }
  }
  if (rng.bernoulli(0.3)) {
    for (int c = 0; c < width; ++c) f.class_map[static_cast<std::size_t>(c)] = classes::kWall;
    for (int c = 0; c < width; ++c) f.instance_map[static_cast<std::size_t>(c)] = 0;
  }
  return f;
}

struct FusionCase {
  perception::LabelMap taskspec;
  perception::DetectionSet openvocab;
  perception::TaskClasses task;
};

/// Random inputs for fuse: a task-specific map composited from random
/// rectangles and an independent set of open-vocabulary rectangles.
inline FusionCase random_fusion_case(Rng& rng, int width, int height) {
  const std::vector<ClassId> pool = {ClassId{10}, ClassId{11}, ClassId{12}, ClassId{13},
                                     ClassId{20}, ClassId{21}, ClassId{23}};
  FusionCase fc;
  fc.task.goal_object = random_class(rng, {ClassId{20}, ClassId{21}});
  fc.task.start_receptacle = rng.bernoulli(0.9) ? random_class(rng, {ClassId{10}, ClassId{11}}) : ClassId{};
  fc.task.goal_receptacle = rng.bernoulli(0.9) ? random_class(rng, {ClassId{12}, ClassId{13}}) : ClassId{};
  auto random_set = [&](perception::Provenance source) {
    perception::DetectionSet d{width, height, source, {}};
    const int n = rng.uniform_int(0, 5);
    for (int k = 0; k < n; ++k) d.detections.push_back({random_class(rng, pool), 1.0, random_rect_mask(rng, width, height)});
    return d;
  };
  fc.taskspec = perception::compose_priority(random_set(perception::Provenance::TaskSpec), fc.task);
  fc.openvocab = random_set(perception::Provenance::OpenVocab);
  return fc;
}

inline bool is_task_class(ClassId c, const perception::TaskClasses& t) {
  return c != classes::kBackground && (c == t.goal_object || c == t.start_receptacle || c == t.goal_receptacle);
}

/// Oracle agreement, idempotence, dominance and fallback soundness for one
/// case. Returns an empty string when everything holds.
inline std::string check_fusion_case(const FusionCase& fc) {
  const auto fused = perception::fuse(fc.taskspec, fc.openvocab, fc.task);
  for (std::int32_t p = 0; p < static_cast<std::int32_t>(fused.size()); ++p) {
    const auto i = static_cast<std::size_t>(p);
    const OraclePixel want = oracle_fuse_pixel(fc.taskspec, fc.openvocab, fc.task, p);
    if (fused.classes[i] != want.cls || fused.provenance[i] != want.provenance) {
      return "oracle mismatch at pixel " + std::to_string(p);
    }
    if (is_task_class(fc.taskspec.classes[i], fc.task) && fused.classes[i] != fc.taskspec.classes[i]) {
      return "dominance violated at pixel " + std::to_string(p);
    }
    if (fused.provenance[i] == perception::Provenance::OpenVocab) {
      bool under_goal = false;
      for (const auto& det : fc.openvocab.detections) {
        if (det.class_id != fc.task.goal_object) continue;
        for (auto q : det.mask) under_goal = under_goal || q == p;
      }
      if (fc.taskspec.classes[i] != classes::kBackground && !under_goal) {
        return "open-vocabulary label outside fallback region at pixel " + std::to_string(p);
      }
    }
    if ((fused.provenance[i] == perception::Provenance::None) != (fused.classes[i] == classes::kBackground)) {
      return "provenance inconsistent at pixel " + std::to_string(p);
    }
  }
  const perception::DetectionSet none{fused.width, fused.height, perception::Provenance::OpenVocab, {}};
  if (perception::fuse(fused, none, fc.task) != fused) return "not idempotent";
  return {};
}

/// Noiseless detectors on a ground-truth frame must give back its task-class
/// masks exactly.
inline std::string check_noiseless_round_trip(const world::Frame& f, const perception::TaskClasses& t,
                                              std::uint64_t seed) {
  Rng rng(seed);
  const auto ts = perception::detect(f, perception::noiseless_profile(perception::Provenance::TaskSpec), rng);
  const auto ov = perception::detect(f, perception::noiseless_profile(perception::Provenance::OpenVocab), rng);
  const auto fused = perception::fuse(perception::compose_priority(ts, t), ov, t);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const bool truth = is_task_class(f.class_map[i], t);
    const bool got = is_task_class(fused.classes[i], t);
    if (truth != got || (truth && fused.classes[i] != f.class_map[i])) {
      return "task mask differs at pixel " + std::to_string(i);
    }
  }
  return {};
}

}  // namespace ovmm::testing
