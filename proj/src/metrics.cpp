#include "adex/metrics.hpp"

namespace adex::metrics {

std::vector<double> EpisodeMetrics::aoi_series() const {
  std::vector<double> s;
  s.reserve(rows.size());
  for (const auto& r : rows) s.push_back(r.aoi_coverage);
  return s;
}

double EpisodeMetrics::final_aoi_coverage() const { return rows.empty() ? 0.0 : rows.back().aoi_coverage; }

double EpisodeMetrics::final_total_coverage() const { return rows.empty() ? 0.0 : rows.back().total_coverage; }

double EpisodeMetrics::total_reward() const {
  double sum = 0.0;
  for (const auto& r : rows) sum += r.reward;
  return sum;
}

std::optional<double> EpisodeMetrics::total_coverage_at_aoi(double level) const {
  for (const auto& r : rows) {
    if (r.aoi_coverage >= level) return r.total_coverage;
  }
  return std::nullopt;
}

std::vector<long> threshold_steps(std::span<const double> series, std::span<const double> thresholds) {
  std::vector<long> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    long found = -1;
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series[i] >= t) {
        found = static_cast<long>(i);
        break;
      }
    }
    out.push_back(found);
  }
  return out;
}

}  // namespace adex::metrics
