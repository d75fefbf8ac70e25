#pragma once

#include <cstddef>
#include <vector>

#include "adex/mapping/maps.hpp"

namespace adex::mapping {

struct Region {
  int x0, y0;  // inclusive
  int x1, y1;  // exclusive
  Cell centroid;

  int area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(Cell c) const { return c.x >= x0 && c.x < x1 && c.y >= y0 && c.y < y1; }
};

/// Regular tiling of the map; regions are numbered row-major.
class RegionGrid {
 public:
  RegionGrid(int width, int height, int side);

  int width() const { return width_; }
  int height() const { return height_; }
  int side() const { return side_; }
  int columns() const { return columns_; }
  int rows() const { return rows_; }
  std::size_t size() const { return regions_.size(); }
  const Region& operator[](std::size_t i) const { return regions_[i]; }
  const std::vector<Region>& regions() const { return regions_; }
  std::size_t region_of(Cell c) const;

 private:
  int width_, height_, side_, columns_, rows_;
  std::vector<Region> regions_;
};

/// Ceil-division tiling; edge regions may be smaller. Centroid is the integer
/// midpoint of each region's bounds.
RegionGrid segment_regions(int width, int height, int side);

struct RegionStats {
  double visited_fraction;  // alpha
  double aoi_estimate;      // beta: mean belief, unseen cells count as the prior
  double distance;          // zeta: |pose - centroid| / map diagonal
};

RegionStats region_stats(const AllocentricMap& belief, const VisitMap& visits, const RegionGrid& grid,
                         AgentPose pose, std::size_t region);

}  // namespace adex::mapping
