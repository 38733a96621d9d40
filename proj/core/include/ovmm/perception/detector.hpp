#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ovmm/common/class_id.hpp"
#include "ovmm/common/rng.hpp"
#include "ovmm/world/render.hpp"

namespace ovmm::perception {

/// Which pipeline stage a labeled pixel came from.
enum class Provenance : std::uint8_t { None, TaskSpec, OpenVocab, GroundTruth };

/// Sorted, duplicate-free linear pixel indices (row-major).
using Mask = std::vector<std::int32_t>;

struct Detection {
  ClassId class_id;
  double confidence = 1.0;
  Mask mask;
};

struct DetectionSet {
  int width = 0;
  int height = 0;
  Provenance source = Provenance::TaskSpec;
  std::vector<Detection> detections;
};

/// Noise model standing in for a trained detector + segmenter.
struct DetectorProfile {
  std::string name;
  Provenance source = Provenance::TaskSpec;
  /// Recall for classes absent from recall_by_class.
  double default_recall = 1.0;
  std::map<ClassId, double> recall_by_class;
  /// Class substitution: true class -> (reported class, probability).
  std::map<ClassId, std::pair<ClassId, double>> confusion;
  int mask_erosion_px = 0;
  /// Per-frame probability of one spurious blob over empty pixels.
  double false_positive_rate = 0.0;
  /// Detections with fewer surviving pixels are dropped.
  int min_mask_px = 1;

  double recall(ClassId c) const {
    auto it = recall_by_class.find(c);
    return it == recall_by_class.end() ? default_recall : it->second;
  }
};

/// Task-specific detector preset: high recall on every episode class.
DetectorProfile taskspec_profile();
/// Open-vocabulary preset: strong on furniture, weak on small objects.
DetectorProfile openvocab_profile();
/// Recall 1, no erosion, no confusion, no false positives.
DetectorProfile noiseless_profile(Provenance source = Provenance::TaskSpec);

/// Simulates one detector pass over the ground-truth instances visible in the
/// frame. Deterministic given the stream state.
DetectionSet detect(const world::Frame& frame, const DetectorProfile& profile, Rng& rng);

/// Erodes a mask with a 4-neighbourhood; pixels outside the frame count as
/// set so masks touching the border are not eaten from that side.
Mask erode(const Mask& mask, int width, int height, int iterations);

}  // namespace ovmm::perception
