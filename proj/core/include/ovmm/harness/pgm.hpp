#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ovmm/perception/fusion.hpp"

namespace ovmm::harness {

/// 8-bit grayscale image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

/// Reads binary (P5) or plain (P2) PGM with maxval <= 255.
GrayImage read_pgm(const std::filesystem::path& path);
/// Writes binary P5.
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Pixel value = class id. Non-background pixels get the given provenance.
perception::LabelMap label_map_from_image(const GrayImage& img, perception::Provenance source);
GrayImage image_from_label_map(const perception::LabelMap& labels);

/// One detection per class present in an already-composited label image.
perception::DetectionSet detections_from_image(const GrayImage& img, perception::Provenance source);

}  // namespace ovmm::harness
