#include "ovmm/harness/pgm.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "ovmm/harness/config.hpp"

namespace ovmm::harness {

namespace {

// Next whitespace-separated header token, skipping '#' comments.
std::string token(std::istream& in) {
  std::string t;
  int ch = 0;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (!std::isspace(ch)) {
      t.push_back(static_cast<char>(ch));
      break;
    }
  }
  while ((ch = in.peek()) != EOF && !std::isspace(ch) && ch != '#') t.push_back(static_cast<char>(in.get()));
  return t;
}

int header_int(std::istream& in, const std::string& path) {
  const std::string t = token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(t, &used);
    if (used == t.size()) return v;
  } catch (const std::exception&) {
  }
  throw IoError("bad PGM header in " + path);
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read image " + path.string());
  const std::string magic = token(in);
  if (magic != "P5" && magic != "P2") throw IoError(path.string() + " is not a PGM file");
  GrayImage img;
  img.width = header_int(in, path.string());
  img.height = header_int(in, path.string());
  const int maxval = header_int(in, path.string());
  if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 255) {
    throw IoError("unsupported PGM geometry or depth in " + path.string());
  }
  const auto n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(n);
  if (magic == "P5") {
    in.get();  // the single whitespace byte after maxval
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw IoError("truncated PGM data in " + path.string());
  } else {
    for (auto& p : img.pixels) {
      const int v = header_int(in, path.string());
      if (v < 0 || v > maxval) throw IoError("PGM value out of range in " + path.string());
      p = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write image " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

perception::LabelMap label_map_from_image(const GrayImage& img, perception::Provenance source) {
  auto out = perception::LabelMap::empty(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    out.classes[i] = ClassId{img.pixels[i]};
    if (img.pixels[i] != 0) out.provenance[i] = source;
  }
  return out;
}

GrayImage image_from_label_map(const perception::LabelMap& labels) {
  GrayImage img{labels.width, labels.height, {}};
  img.pixels.reserve(labels.size());
  for (auto c : labels.classes) img.pixels.push_back(c.value);
  return img;
}

perception::DetectionSet detections_from_image(const GrayImage& img, perception::Provenance source) {
  std::map<std::uint8_t, perception::Mask> masks;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (img.pixels[i] != 0) masks[img.pixels[i]].push_back(static_cast<std::int32_t>(i));
  }
  perception::DetectionSet set{img.width, img.height, source, {}};
  for (auto& [cls, mask] : masks) set.detections.push_back({ClassId{cls}, 1.0, std::move(mask)});
  return set;
}

}  // namespace ovmm::harness
