#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "adex/env/scenario.hpp"
#include "adex/mapping/maps.hpp"
#include "adex/mapping/regions.hpp"

namespace adex::policy {

using env::AgentPose;
using env::Cell;

// ---------------------------------------------------------------------------
// Target selection

/// Linear information-gain objective over regions. Coverage and distance are
/// costs (<= 0), AoI potential a gain (>= 0).
struct ObjectiveWeights {
  double coverage = -1.0;
  double aoi = 1.0;
  double distance = -0.3;
};

void validate(const ObjectiveWeights& w);

struct TargetAssignment {
  std::size_t region = 0;
  Cell target;        // centroid of the chosen region
  Cell local_target;  // closest cell to target inside the egocentric window
};

double objective(const ObjectiveWeights& w, const mapping::RegionStats& s);

/// argmax of the objective over all regions, lowest index on ties. The
/// region the agent is in is a candidate like any other.
TargetAssignment select_target(const mapping::RegionGrid& grid, const mapping::AllocentricMap& belief,
                               const mapping::VisitMap& visits, AgentPose pose, const ObjectiveWeights& w,
                               int ego_side = 25);

/// Cell of the (side x side) window around pose, clipped to the map, that
/// is nearest to target in Euclidean distance. Ties go to smaller y, then x.
Cell select_local_target(Cell target, AgentPose pose, int side, int width, int height);

// ---------------------------------------------------------------------------
// Network inputs

/// Input masks for the ablation study. Each one zeroes a single input
/// tensor; no_lstm is an architecture switch handled by the networks.
struct Ablation {
  bool no_visits = false;
  bool no_map = false;
  bool no_lstm = false;

  friend bool operator==(const Ablation&, const Ablation&) = default;
};

inline constexpr std::size_t kNavStateSize = 31;
inline constexpr std::size_t kExplStateSize = 29;
inline constexpr double kEgoHalfWidth = 12.0;

/// 25 observation values, 4 neighbour visit values (left, right, top,
/// bottom), then (dx, dy) to the local target divided by 12.
std::array<double, kNavStateSize> navigation_state(const env::Observation& o,
                                                   const std::array<double, 4>& adjacency, AgentPose pose,
                                                   Cell local_target, const Ablation& ablation = {});

/// 25 observation values followed by the 4 neighbour visit values.
std::array<double, kExplStateSize> exploration_state(const env::Observation& o,
                                                     const std::array<double, 4>& adjacency,
                                                     const Ablation& ablation = {});

// ---------------------------------------------------------------------------
// Rewards

struct RewardConfig {
  double aoi = 1.0;
  double visited = 0.25;
  double reach_local = 10.0;
  double reach_target = 50.0;
  double aoi_threshold = 0.5;
  double step_cost = 0.0;
  /// Weight of the potential-based distance term for navigation (0 = off).
  double shaping = 0.0;
  /// Discount used in that term; match the navigation learner's gamma so the
  /// shaped task keeps the same optimal policy.
  double shaping_discount = 0.95;
};

void validate(const RewardConfig& cfg);

/// x is the cell occupied after the action; visits must not yet include it.
/// Terms add up: first-visit AoI bonus, scaled revisit penalty, reach bonus
/// (reaching T replaces the T_L bonus), minus the step cost.
double reward_navigation(Cell x, const mapping::AllocentricMap& belief, const mapping::VisitMap& visits,
                         const RewardConfig& cfg, std::optional<Cell> local_target, std::optional<Cell> target,
                         const mapping::VisitEncodingConfig& visit_cfg = {});

/// Potential-based shaping with phi(p) = -shaping * |p - local_target|:
/// gamma * phi(after) - phi(before). Zero when shaping is off.
double navigation_shaping(Cell before, Cell after, Cell local_target, const RewardConfig& cfg);

/// Navigation reward without the two reach terms.
double reward_exploration(Cell x, const mapping::AllocentricMap& belief, const mapping::VisitMap& visits,
                          const RewardConfig& cfg, const mapping::VisitEncodingConfig& visit_cfg = {});

// ---------------------------------------------------------------------------
// Phase termination

bool navigation_done(AgentPose pose, Cell target, std::size_t steps_in_phase, std::size_t step_limit);

struct StagnationRule {
  std::size_t window = 100;
  double min_growth = 0.05;
  /// Growth is measured relative to max(mass a window ago, floor).
  double mass_floor = 1.0;
};

/// mass_history[k] is the cumulative discovered AoI mass after k steps of
/// the phase (so it holds steps_in_phase + 1 entries).
bool exploration_done(std::span<const double> mass_history, std::size_t steps_in_phase, std::size_t step_limit,
                      const StagnationRule& rule = {});

}  // namespace adex::policy
