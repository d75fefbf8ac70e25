#pragma once

#include <cstddef>
#include <span>

#include "adex/env/scenario.hpp"
#include "adex/mapping/maps.hpp"
#include "adex/mapping/regions.hpp"
#include "adex/policy/policy.hpp"

namespace adex::agents {

using env::Action;
using env::AgentPose;
using env::Cell;

/// Mechanics shared by every policy: sensing, mapping, rewards and the phase
/// limits of the cyclic explorer.
struct EnvironmentConfig {
  int observation_side = 5;
  int ego_side = 25;
  int region_side = 60;
  mapping::BeliefUpdate belief_update = mapping::BeliefUpdate::overwrite;
  mapping::VisitEncodingConfig visits;
  policy::ObjectiveWeights weights;
  policy::RewardConfig reward;
  std::size_t nav_step_limit = 500;   // kappa_1
  std::size_t expl_step_limit = 300;  // kappa_2
  policy::StagnationRule stagnation;
  policy::Ablation ablation;
};

void validate(const EnvironmentConfig& cfg);

/// One agent on one map: pose, belief M, visits V and coverage bookkeeping.
/// Construction takes the first observation at the start cell.
class World {
 public:
  World(const env::GroundTruthMap& map, AgentPose start, const EnvironmentConfig& cfg);

  const env::GroundTruthMap& map() const { return *map_; }
  const EnvironmentConfig& config() const { return *cfg_; }
  AgentPose pose() const { return pose_; }
  const env::Observation& observation() const { return observation_; }
  const mapping::AllocentricMap& belief() const { return belief_; }
  const mapping::VisitMap& visits() const { return visits_; }
  std::size_t steps() const { return steps_; }

  /// Seen share of the ground-truth AoI mass; 1 on a map without AoI.
  double aoi_coverage() const;
  /// Seen share of all cells.
  double total_coverage() const;
  /// Sum of observed values over seen cells, frozen at first sight so the
  /// series never decreases.
  double discovered_mass() const { return discovered_mass_; }
  bool victim_seen() const { return victim_seen_; }

  AgentPose peek(Action a) const;
  void advance(Action a);

  std::array<double, 4> adjacency() const;

  /// Network inputs for the current step, with ablation masks applied.
  void navigation_input(Cell local_target, std::span<double> state, std::span<double> ego_map) const;
  void exploration_input(std::span<double> state, std::span<double> ego_map) const;

 private:
  void sense();

  const env::GroundTruthMap* map_;
  const EnvironmentConfig* cfg_;
  AgentPose pose_;
  env::Observation observation_;
  mapping::AllocentricMap belief_;
  mapping::VisitMap visits_;
  std::size_t steps_ = 0;
  double seen_truth_mass_ = 0.0;
  double discovered_mass_ = 0.0;
  bool victim_seen_ = false;
};

}  // namespace adex::agents
