#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "adex/env/grid.hpp"

namespace adex::metrics {

struct StepRecord {
  std::size_t step = 0;
  int x = 0;
  int y = 0;
  double aoi_coverage = 0.0;
  double total_coverage = 0.0;
  double reward = 0.0;
};

/// rows[0] describes the start (after the first observation); rows[k] the
/// state after k actions. Coverage columns never decrease.
struct EpisodeMetrics {
  std::vector<StepRecord> rows;
  std::vector<env::Cell> targets;
  std::optional<std::size_t> victim_step;

  std::size_t steps() const { return rows.empty() ? 0 : rows.size() - 1; }
  std::vector<double> aoi_series() const;
  double final_aoi_coverage() const;
  double final_total_coverage() const;
  double total_reward() const;
  /// Total map coverage at the first step whose AoI coverage reaches level,
  /// or empty if it never does.
  std::optional<double> total_coverage_at_aoi(double level) const;
};

inline constexpr std::array<double, 3> kCoverageThresholds = {0.3, 0.5, 0.7};

/// First index with series[i] >= threshold, -1 if none, for each threshold.
std::vector<long> threshold_steps(std::span<const double> series, std::span<const double> thresholds);

}  // namespace adex::metrics
