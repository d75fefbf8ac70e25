#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adex/env/grid.hpp"

namespace adex::env {

inline constexpr int kMinMapSide = 5;

/// Hidden per-cell AoI probability field. Immutable once built.
class GroundTruthMap {
 public:
  GroundTruthMap(int width, int height, std::vector<double> aoi, std::optional<Cell> victim = {});

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t cell_count() const { return aoi_.size(); }
  double at(int x, int y) const { return aoi_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(Cell c) const { return at(c.x, c.y); }
  std::span<const double> values() const { return aoi_; }
  const std::optional<Cell>& victim() const { return victim_; }
  /// Sum of all cell probabilities.
  double total_mass() const { return total_mass_; }

  friend bool operator==(const GroundTruthMap&, const GroundTruthMap&) = default;

 private:
  int width_;
  int height_;
  std::vector<double> aoi_;
  std::optional<Cell> victim_;
  double total_mass_ = 0.0;
};

enum class ScenarioKind { aoi_field, sar_victim };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& text);

struct ScenarioSpec {
  int width = 180;
  int height = 180;
  /// Exact number of blobs; when empty, blobs are added until the AoI mass
  /// fraction is as close as possible to `density`.
  std::optional<int> blob_count;
  double density = 0.08;
  /// Blob standard deviation in cells (geometric mean of both axes).
  double blob_sigma = 6.0;
  /// Largest sigma_x / sigma_y ratio; 1 gives round blobs.
  double aspect = 2.0;
  /// Salt-and-pepper rate: each cell is replaced by 0 or 1 with this probability.
  double noise_rate = 0.0;
  ScenarioKind kind = ScenarioKind::aoi_field;
  double victim_sigma = 1.0;
  std::uint64_t seed = 0;
};

void validate(const ScenarioSpec& spec);

/// Blobs first (centers uniform, rotated anisotropic Gaussian bumps, summed
/// and saturated at 1), then noise, then the victim halo for SaR scenarios.
GroundTruthMap generate_scenario(const ScenarioSpec& spec);

/// Agent-centred side x side window of ground truth, row-major from the top
/// row. Cells outside the map hold kOutside.
struct Observation {
  int side = 5;
  std::vector<double> values;

  double at(int dx, int dy) const;  // offsets from the centre
};

inline constexpr double kOutside = -1.0;

Observation observe(const GroundTruthMap& map, AgentPose pose, int side = 5);

}  // namespace adex::env
