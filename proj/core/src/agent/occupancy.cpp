#include "ovmm/agent/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace ovmm::agent {

OccupancyGrid::OccupancyGrid(const Rect& bounds, double resolution)
    : bounds_(bounds),
      resolution_(resolution),
      rows_(static_cast<int>(std::ceil(bounds.height() / resolution))),
      cols_(static_cast<int>(std::ceil(bounds.width() / resolution))),
      cells_(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), Cell::Unknown) {}

GridCell OccupancyGrid::cell_of(Vec2 p) const {
  return {static_cast<int>(std::floor((p.y - bounds_.min_y) / resolution_)),
          static_cast<int>(std::floor((p.x - bounds_.min_x) / resolution_))};
}

Vec2 OccupancyGrid::center_of(GridCell c) const {
  return {bounds_.min_x + (c.col + 0.5) * resolution_, bounds_.min_y + (c.row + 0.5) * resolution_};
}

void OccupancyGrid::set(GridCell c, Cell v) {
  if (in_grid(c)) cells_[index(c)] = v;
}

void OccupancyGrid::mark_occupied(Vec2 p) { set(cell_of(p), Cell::Occupied); }

void OccupancyGrid::integrate(const world::Frame& frame, const world::CameraConfig& cam,
                              const Pose2& pose, double carve_limit) {
  const Vec2 origin = pose.position();
  for (int c = 0; c < frame.width; ++c) {
    double hit = std::numeric_limits<double>::infinity();
    for (int r = 0; r < frame.height; ++r) {
      const auto i = frame.index(r, c);
      const ClassId k = frame.class_map[i];
      if (k == classes::kBackground || k == classes::kRobot) continue;
      hit = std::min(hit, static_cast<double>(frame.depth_map[i]));
    }
    const Vec2 dir = heading_vector(pose.theta + cam.column_azimuth(c));
    const double carve = std::min(hit - 0.5 * resolution_, carve_limit);
    for (double t = 0.0; t < carve; t += 0.5 * resolution_) {
      const GridCell g = cell_of(origin + t * dir);
      if (in_grid(g) && at(g) == Cell::Unknown) set(g, Cell::Free);
    }
    if (std::isfinite(hit) && hit < cam.max_range) set(cell_of(origin + hit * dir), Cell::Occupied);
  }
}

std::vector<std::uint8_t> OccupancyGrid::blocked_mask(double radius) const {
  std::vector<std::uint8_t> blocked(cells_.size(), 0);
  const int reach = static_cast<int>(std::ceil(radius / resolution_));
  std::vector<GridCell> offsets;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      if (std::hypot(dr, dc) * resolution_ <= radius) offsets.push_back({dr, dc});
    }
  }
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (cells_[index({r, c})] != Cell::Occupied) continue;
      for (const auto& o : offsets) {
        const GridCell n{r + o.row, c + o.col};
        if (in_grid(n)) blocked[index(n)] = 1;
      }
    }
  }
  return blocked;
}

bool OccupancyGrid::is_frontier(GridCell c) const {
  if (!in_grid(c) || at(c) != Cell::Free) return false;
  const GridCell n4[4] = {{c.row - 1, c.col}, {c.row + 1, c.col}, {c.row, c.col - 1}, {c.row, c.col + 1}};
  for (const auto& n : n4) {
    if (in_grid(n) && at(n) == Cell::Unknown) return true;
  }
  return false;
}

std::optional<std::vector<Vec2>> OccupancyGrid::plan(Vec2 start, const std::function<bool(GridCell)>& is_goal,
                                                     const std::vector<std::uint8_t>& blocked) const {
  const GridCell s = cell_of(start);
  if (!in_grid(s)) return std::nullopt;
  const std::size_t n = cells_.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::int32_t> parent(n, -1);
  using Item = std::pair<double, std::int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[index(s)] = 0.0;
  open.push({0.0, static_cast<std::int32_t>(index(s))});

  static constexpr int kDr[8] = {-1, 1, 0, 0, -1, -1, 1, 1};
  static constexpr int kDc[8] = {0, 0, -1, 1, -1, 1, -1, 1};
  std::int32_t goal = -1;
  while (!open.empty()) {
    const auto [d, idx] = open.top();
    open.pop();
    if (d > dist[static_cast<std::size_t>(idx)]) continue;
    const GridCell cur{idx / cols_, idx % cols_};
    if (is_goal(cur)) {
      goal = idx;
      break;
    }
    for (int k = 0; k < 8; ++k) {
      const GridCell nb{cur.row + kDr[k], cur.col + kDc[k]};
      if (!in_grid(nb) || blocked[index(nb)]) continue;
      if (k >= 4 && (blocked[index({cur.row + kDr[k], cur.col})] || blocked[index({cur.row, cur.col + kDc[k]})])) {
        continue;
      }
      const double nd = d + (k < 4 ? 1.0 : std::sqrt(2.0));
      const auto ni = index(nb);
      if (nd < dist[ni]) {
        dist[ni] = nd;
        parent[ni] = idx;
        open.push({nd, static_cast<std::int32_t>(ni)});
      }
    }
  }
  if (goal < 0) return std::nullopt;
  std::vector<Vec2> path;
  for (std::int32_t i = goal; i >= 0; i = parent[static_cast<std::size_t>(i)]) {
    path.push_back(center_of({i / cols_, i % cols_}));
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double path_length(const std::vector<Vec2>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += distance(path[i - 1], path[i]);
  return len;
}

}  // namespace ovmm::agent
