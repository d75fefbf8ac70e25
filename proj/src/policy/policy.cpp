#include "adex/policy/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adex/error.hpp"

namespace adex::policy {

void validate(const ObjectiveWeights& w) {
  if (w.coverage > 0.0 || w.aoi < 0.0 || w.distance > 0.0) {
    throw ConfigError("objective weights need coverage <= 0, aoi >= 0, distance <= 0");
  }
}

double objective(const ObjectiveWeights& w, const mapping::RegionStats& s) {
  return w.coverage * s.visited_fraction + w.aoi * s.aoi_estimate + w.distance * s.distance;
}

Cell select_local_target(Cell target, AgentPose pose, int side, int width, int height) {
  const int r = side / 2;
  const int x0 = std::max(0, pose.x - r);
  const int x1 = std::min(width - 1, pose.x + r);
  const int y0 = std::max(0, pose.y - r);
  const int y1 = std::min(height - 1, pose.y + r);
  // Nearest point of an axis-aligned box is the per-axis clamp; it is unique,
  // so the tie rule never has to fire.
  return {std::clamp(target.x, x0, x1), std::clamp(target.y, y0, y1)};
}

TargetAssignment select_target(const mapping::RegionGrid& grid, const mapping::AllocentricMap& belief,
                               const mapping::VisitMap& visits, AgentPose pose, const ObjectiveWeights& w,
                               int ego_side) {
  if (grid.size() == 0) throw ConfigError("region grid is empty");
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double score = objective(w, mapping::region_stats(belief, visits, grid, pose, i));
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  TargetAssignment a;
  a.region = best;
  a.target = grid[best].centroid;
  a.local_target = select_local_target(a.target, pose, ego_side, grid.width(), grid.height());
  return a;
}

std::array<double, kNavStateSize> navigation_state(const env::Observation& o,
                                                   const std::array<double, 4>& adjacency, AgentPose pose,
                                                   Cell local_target, const Ablation& ablation) {
  if (o.values.size() != 25) throw ConfigError("navigation state expects a 5x5 observation");
  std::array<double, kNavStateSize> s{};
  std::copy(o.values.begin(), o.values.end(), s.begin());
  if (!ablation.no_visits) std::copy(adjacency.begin(), adjacency.end(), s.begin() + 25);
  s[29] = (local_target.x - pose.x) / kEgoHalfWidth;
  s[30] = (local_target.y - pose.y) / kEgoHalfWidth;
  return s;
}

std::array<double, kExplStateSize> exploration_state(const env::Observation& o,
                                                     const std::array<double, 4>& adjacency,
                                                     const Ablation& ablation) {
  if (o.values.size() != 25) throw ConfigError("exploration state expects a 5x5 observation");
  std::array<double, kExplStateSize> s{};
  std::copy(o.values.begin(), o.values.end(), s.begin());
  if (!ablation.no_visits) std::copy(adjacency.begin(), adjacency.end(), s.begin() + 25);
  return s;
}

void validate(const RewardConfig& cfg) {
  if (cfg.aoi < 0 || cfg.visited < 0 || cfg.reach_local < 0 || cfg.reach_target < 0) {
    throw ConfigError("reward magnitudes must be nonnegative");
  }
  if (!(cfg.aoi_threshold > 0.0 && cfg.aoi_threshold < 1.0)) {
    throw ConfigError("reward AoI threshold must be in (0,1)");
  }
  if (cfg.shaping < 0) throw ConfigError("reward shaping weight must be nonnegative");
  if (!(cfg.shaping_discount > 0.0 && cfg.shaping_discount <= 1.0)) {
    throw ConfigError("reward shaping discount must be in (0,1]");
  }
}

double navigation_shaping(Cell before, Cell after, Cell local_target, const RewardConfig& cfg) {
  if (cfg.shaping == 0.0) return 0.0;
  auto phi = [&](Cell p) {
    return -cfg.shaping * std::hypot(static_cast<double>(p.x - local_target.x), static_cast<double>(p.y - local_target.y));
  };
  return cfg.shaping_discount * phi(after) - phi(before);
}

double reward_exploration(Cell x, const mapping::AllocentricMap& belief, const mapping::VisitMap& visits,
                          const RewardConfig& cfg, const mapping::VisitEncodingConfig& visit_cfg) {
  double r = -cfg.step_cost;
  const std::uint32_t count = visits.count(x);
  if (count == 0) {
    if (belief.seen(x) && belief.belief(x) > cfg.aoi_threshold) r += cfg.aoi;
  } else {
    r -= cfg.visited * mapping::visit_value(count, visit_cfg);
  }
  return r;
}

double reward_navigation(Cell x, const mapping::AllocentricMap& belief, const mapping::VisitMap& visits,
                         const RewardConfig& cfg, std::optional<Cell> local_target, std::optional<Cell> target,
                         const mapping::VisitEncodingConfig& visit_cfg) {
  double r = reward_exploration(x, belief, visits, cfg, visit_cfg);
  if (target && x == *target) {
    r += cfg.reach_target;
  } else if (local_target && x == *local_target) {
    r += cfg.reach_local;
  }
  return r;
}

bool navigation_done(AgentPose pose, Cell target, std::size_t steps_in_phase, std::size_t step_limit) {
  return pose == target || steps_in_phase >= step_limit;
}

bool exploration_done(std::span<const double> mass_history, std::size_t steps_in_phase, std::size_t step_limit,
                      const StagnationRule& rule) {
  if (steps_in_phase >= step_limit) return true;
  if (steps_in_phase < rule.window || mass_history.size() <= rule.window) return false;
  const double now = mass_history.back();
  const double before = mass_history[mass_history.size() - 1 - rule.window];
  return (now - before) < rule.min_growth * std::max(before, rule.mass_floor);
}

}  // namespace adex::policy
