#include "adex/mapping/regions.hpp"

#include <algorithm>
#include <cmath>

#include "adex/error.hpp"

namespace adex::mapping {

RegionGrid::RegionGrid(int width, int height, int side)
    : width_(width), height_(height), side_(side) {
  if (width <= 0 || height <= 0) throw ConfigError("region grid needs positive map dimensions");
  if (side <= 0 || side > std::min(width, height)) {
    throw ConfigError("region side must be in (0, min(W,H)]");
  }
  columns_ = (width + side - 1) / side;
  rows_ = (height + side - 1) / side;
  regions_.reserve(static_cast<std::size_t>(columns_) * rows_);
  for (int ry = 0; ry < rows_; ++ry) {
    for (int rx = 0; rx < columns_; ++rx) {
      Region r{};
      r.x0 = rx * side;
      r.y0 = ry * side;
      r.x1 = std::min(width, r.x0 + side);
      r.y1 = std::min(height, r.y0 + side);
      r.centroid = {r.x0 + (r.x1 - r.x0) / 2, r.y0 + (r.y1 - r.y0) / 2};
      regions_.push_back(r);
    }
  }
}

std::size_t RegionGrid::region_of(Cell c) const {
  return static_cast<std::size_t>(c.y / side_) * columns_ + static_cast<std::size_t>(c.x / side_);
}

RegionGrid segment_regions(int width, int height, int side) { return RegionGrid(width, height, side); }

RegionStats region_stats(const AllocentricMap& belief, const VisitMap& visits, const RegionGrid& grid,
                         AgentPose pose, std::size_t region) {
  if (region >= grid.size()) throw ConfigError("region index out of range");
  const Region& r = grid[region];
  std::size_t visited = 0;
  double belief_sum = 0.0;
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) {
      const Cell c{x, y};
      if (visits.visited(c)) ++visited;
      belief_sum += belief.seen(c) ? belief.belief(c) : belief.prior();
    }
  }
  const double area = r.area();
  const double dx = pose.x - r.centroid.x;
  const double dy = pose.y - r.centroid.y;
  const double diagonal = std::hypot(static_cast<double>(grid.width()), static_cast<double>(grid.height()));
  return {static_cast<double>(visited) / area, belief_sum / area, std::hypot(dx, dy) / diagonal};
}

}  // namespace adex::mapping
