#include "ovmm/perception/detector.hpp"

#include <algorithm>

#include "ovmm/world/scene.hpp"

namespace ovmm::perception {

DetectorProfile taskspec_profile() {
  DetectorProfile p;
  p.name = "taskspec";
  p.source = Provenance::TaskSpec;
  p.default_recall = 0.9;
  const auto spec = world::default_scene_spec();
  for (const auto& r : spec.receptacle_classes) p.recall_by_class[r.id] = 0.9;
  for (const auto& o : spec.object_classes) p.recall_by_class[o.id] = 0.9;
  // Classes that are sparsely annotated in the fine-tuning set.
  p.recall_by_class[ClassId{14}] = 0.15;  // shelf
  p.recall_by_class[ClassId{15}] = 0.15;  // bench
  p.recall_by_class[ClassId{21}] = 0.2;   // book
  p.recall_by_class[ClassId{22}] = 0.2;   // hat
  p.confusion[ClassId{15}] = {ClassId{13}, 0.05};  // bench -> chair
  p.mask_erosion_px = 0;
  p.false_positive_rate = 0.02;
  p.min_mask_px = 3;
  return p;
}

DetectorProfile openvocab_profile() {
  DetectorProfile p;
  p.name = "openvocab";
  p.source = Provenance::OpenVocab;
  p.default_recall = 0.8;
  const auto spec = world::default_scene_spec();
  for (const auto& r : spec.receptacle_classes) p.recall_by_class[r.id] = 0.9;
  // Recall falls off with object size.
  p.recall_by_class[ClassId{20}] = 0.3;   // cup, 8 cm
  p.recall_by_class[ClassId{24}] = 0.35;  // toy, 10 cm
  p.recall_by_class[ClassId{23}] = 0.4;   // bowl, 12 cm
  p.recall_by_class[ClassId{21}] = 0.8;   // book, 14 cm
  p.recall_by_class[ClassId{22}] = 0.8;   // hat, 16 cm
  p.confusion[ClassId{11}] = {ClassId{10}, 0.10};  // counter -> table
  p.confusion[ClassId{12}] = {ClassId{14}, 0.05};  // cabinet -> shelf
  p.confusion[ClassId{20}] = {ClassId{23}, 0.10};  // cup -> bowl
  p.mask_erosion_px = 1;
  p.false_positive_rate = 0.03;
  p.min_mask_px = 4;
  return p;
}

DetectorProfile noiseless_profile(Provenance source) {
  DetectorProfile p;
  p.name = "noiseless";
  p.source = source;
  p.default_recall = 1.0;
  p.min_mask_px = 1;
  return p;
}

Mask erode(const Mask& mask, int width, int height, int iterations) {
  if (iterations <= 0 || mask.empty()) return mask;
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> cur(n, 0);
  for (auto i : mask) cur[static_cast<std::size_t>(i)] = 1;
  Mask out = mask;
  for (int it = 0; it < iterations && !out.empty(); ++it) {
    auto set = [&](int r, int c) {
      if (r < 0 || r >= height || c < 0 || c >= width) return true;
      return cur[static_cast<std::size_t>(r * width + c)] != 0;
    };
    Mask kept;
    kept.reserve(out.size());
    for (auto i : out) {
      const int r = i / width;
      const int c = i % width;
      if (set(r - 1, c) && set(r + 1, c) && set(r, c - 1) && set(r, c + 1)) kept.push_back(i);
    }
    std::fill(cur.begin(), cur.end(), 0);
    for (auto i : kept) cur[static_cast<std::size_t>(i)] = 1;
    out = std::move(kept);
  }
  return out;
}

DetectionSet detect(const world::Frame& frame, const DetectorProfile& profile, Rng& rng) {
  DetectionSet out;
  out.width = frame.width;
  out.height = frame.height;
  out.source = profile.source;

  std::map<std::int32_t, Mask> instances;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame.instance_map[i] != 0) {
      instances[frame.instance_map[i]].push_back(static_cast<std::int32_t>(i));
    }
  }
  const auto min_px = static_cast<std::size_t>(std::max(1, profile.min_mask_px));

  for (auto& [instance, pixels] : instances) {
    const ClassId truth = frame.class_map[static_cast<std::size_t>(pixels.front())];
    if (!rng.bernoulli(profile.recall(truth))) continue;
    ClassId reported = truth;
    if (auto it = profile.confusion.find(truth); it != profile.confusion.end()) {
      if (rng.bernoulli(it->second.second)) reported = it->second.first;
    }
    Mask mask = erode(pixels, frame.width, frame.height, profile.mask_erosion_px);
    const double confidence = rng.uniform(0.6, 1.0);
    if (mask.size() < min_px) continue;
    out.detections.push_back({reported, confidence, std::move(mask)});
  }

  if (profile.false_positive_rate > 0.0 && rng.bernoulli(profile.false_positive_rate)) {
    std::vector<ClassId> pool;
    for (const auto& [c, r] : profile.recall_by_class) pool.push_back(c);
    if (!pool.empty()) {
      const ClassId c = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
      const int bw = rng.uniform_int(3, 8);
      const int bh = rng.uniform_int(3, 8);
      const int c0 = rng.uniform_int(0, std::max(0, frame.width - bw));
      const int r0 = rng.uniform_int(0, std::max(0, frame.height - bh));
      Mask blob;
      for (int r = r0; r < std::min(frame.height, r0 + bh); ++r) {
        for (int col = c0; col < std::min(frame.width, c0 + bw); ++col) {
          const auto i = frame.index(r, col);
          if (frame.instance_map[i] == 0 && frame.class_map[i] != classes::kRobot) {
            blob.push_back(static_cast<std::int32_t>(i));
          }
        }
      }
      std::sort(blob.begin(), blob.end());
      if (blob.size() >= min_px) out.detections.push_back({c, rng.uniform(0.3, 0.7), std::move(blob)});
    }
  }
  return out;
}

}  // namespace ovmm::perception
