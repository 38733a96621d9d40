#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ovmm/common/geometry.hpp"
#include "ovmm/world/render.hpp"

namespace ovmm::agent {

struct GridCell {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// 2-D occupancy map built from depth frames.
class OccupancyGrid {
 public:
  enum class Cell : std::uint8_t { Unknown, Free, Occupied };

  OccupancyGrid() = default;
  OccupancyGrid(const Rect& bounds, double resolution);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double resolution() const { return resolution_; }
  const Rect& bounds() const { return bounds_; }

  bool in_grid(GridCell c) const { return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_; }
  GridCell cell_of(Vec2 p) const;
  Vec2 center_of(GridCell c) const;
  Cell at(GridCell c) const { return cells_[index(c)]; }
  void set(GridCell c, Cell v);

  void mark_occupied(Vec2 p);

  /// Carves free space along every column's ray up to its nearest hit and
  /// marks the hit occupied. Arm-occluded pixels are skipped.
  void integrate(const world::Frame& frame, const world::CameraConfig& cam, const Pose2& pose,
                 double carve_limit = 4.0);

  /// Cells within `radius` of an occupied cell. Unknown cells are traversable.
  std::vector<std::uint8_t> blocked_mask(double radius) const;

  /// Dijkstra over the 8-connected grid from `start` to the nearest cell
  /// accepted by `is_goal`. Returns cell centers from start to goal.
  std::optional<std::vector<Vec2>> plan(Vec2 start, const std::function<bool(GridCell)>& is_goal,
                                        const std::vector<std::uint8_t>& blocked) const;

  /// Free cell with an unknown 4-neighbour.
  bool is_frontier(GridCell c) const;

 private:
  std::size_t index(GridCell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c.col);
  }

  Rect bounds_;
  double resolution_ = 0.1;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Cell> cells_;
};

/// Length of a polyline.
double path_length(const std::vector<Vec2>& path);

}  // namespace ovmm::agent
