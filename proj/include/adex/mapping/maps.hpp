#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "adex/env/grid.hpp"
#include "adex/env/scenario.hpp"

namespace adex::mapping {

using env::AgentPose;
using env::Cell;

inline constexpr double kDefaultPrior = 0.5;
inline constexpr double kUnseen = -1.0;

enum class BeliefUpdate { overwrite, moving_average };

/// World-fixed belief M. Unseen cells hold the prior.
class AllocentricMap {
 public:
  AllocentricMap(int width, int height, double prior = kDefaultPrior);

  int width() const { return width_; }
  int height() const { return height_; }
  double prior() const { return prior_; }
  double belief(Cell c) const { return belief_[index(c)]; }
  bool seen(Cell c) const { return seen_[index(c)] != 0; }
  std::size_t seen_count() const { return seen_count_; }
  std::span<const double> beliefs() const { return belief_; }

  /// Records an observed value. Returns true if the cell was unseen before.
  bool update(Cell c, double observed, BeliefUpdate rule, double rate = 0.5);

 private:
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }

  int width_;
  int height_;
  double prior_;
  std::vector<double> belief_;
  std::vector<std::uint8_t> seen_;
  std::size_t seen_count_ = 0;
};

/// Per-cell occupancy counts V.
class VisitMap {
 public:
  VisitMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint32_t count(Cell c) const { return counts_[static_cast<std::size_t>(c.y) * width_ + c.x]; }
  bool visited(Cell c) const { return count(c) > 0; }
  void record(Cell c) { ++counts_[static_cast<std::size_t>(c.y) * width_ + c.x]; ++total_; }
  std::uint64_t total() const { return total_; }
  std::span<const std::uint32_t> counts() const { return counts_; }

 private:
  int width_;
  int height_;
  std::vector<std::uint32_t> counts_;
  std::uint64_t total_ = 0;
};

struct NewlySeen {
  Cell cell;
  double observed;
};

/// Folds an observation into M and counts a visit at pose. Returns the cells
/// that became seen, in window order.
std::vector<NewlySeen> integrate_observation(AllocentricMap& belief, VisitMap& visits,
                                             const env::Observation& o, AgentPose pose,
                                             BeliefUpdate rule = BeliefUpdate::overwrite);

/// Agent-centred crop of M: belief where seen, kUnseen where unseen or off-map.
struct EgocentricMap {
  int side = 25;
  AgentPose anchor;
  std::vector<double> values;  // row-major from the top row

  double at(int dx, int dy) const;
};

EgocentricMap extract_egocentric(const AllocentricMap& belief, AgentPose pose, int side = 25);

/// Writes the same crop into an existing buffer of side * side values.
void extract_egocentric_into(const AllocentricMap& belief, AgentPose pose, int side, std::span<double> out);

enum class VisitEncoding { scaled, binary };

struct VisitEncodingConfig {
  VisitEncoding encoding = VisitEncoding::scaled;
  /// Visits at which the scaled value saturates at 1.
  int saturation = 5;
};

double visit_value(std::uint32_t count, const VisitEncodingConfig& cfg);

/// Neighbour visit values in the order left, right, top, bottom. Neighbours
/// off the map report 1.
std::array<double, 4> visited_adjacency(const VisitMap& visits, AgentPose pose,
                                        const VisitEncodingConfig& cfg = {});

}  // namespace adex::mapping
