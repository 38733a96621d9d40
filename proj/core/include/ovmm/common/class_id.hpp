#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace ovmm {

/// Semantic class identifier. Fits in one byte so label maps round-trip
/// through 8-bit grayscale images.
struct ClassId {
  std::uint8_t value = 0;

  constexpr ClassId() = default;
  constexpr explicit ClassId(std::uint8_t v) : value(v) {}

  friend constexpr auto operator<=>(ClassId, ClassId) = default;
};

namespace classes {
inline constexpr ClassId kBackground{0};
inline constexpr ClassId kWall{1};
/// Pixels covered by the agent's own arm.
inline constexpr ClassId kRobot{2};
}  // namespace classes

constexpr bool is_reserved(ClassId c) { return c.value < 3; }

}  // namespace ovmm

template <>
struct std::hash<ovmm::ClassId> {
  std::size_t operator()(ovmm::ClassId c) const noexcept { return c.value; }
};
