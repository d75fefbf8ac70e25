#include "adex/agents/world.hpp"

#include <algorithm>

#include "adex/error.hpp"

namespace adex::agents {

void validate(const EnvironmentConfig& cfg) {
  if (cfg.observation_side != 5) throw ConfigError("observation side must be 5 (network input width)");
  if (cfg.ego_side != cfg.observation_side * cfg.observation_side) {
    throw ConfigError("egocentric side must be the square of the observation side");
  }
  if (cfg.region_side <= 0) throw ConfigError("region side must be positive");
  if (cfg.visits.saturation <= 0) throw ConfigError("visit saturation must be positive");
  if (cfg.nav_step_limit == 0 || cfg.expl_step_limit == 0) throw ConfigError("phase step limits must be positive");
  if (cfg.stagnation.window == 0) throw ConfigError("stagnation window must be positive");
  policy::validate(cfg.weights);
  policy::validate(cfg.reward);
}

World::World(const env::GroundTruthMap& map, AgentPose start, const EnvironmentConfig& cfg)
    : map_(&map),
      cfg_(&cfg),
      pose_(start),
      belief_(map.width(), map.height()),
      visits_(map.width(), map.height()) {
  if (!env::in_bounds(start, map.width(), map.height())) throw ConfigError("start pose outside the map");
  sense();
}

void World::sense() {
  observation_ = env::observe(*map_, pose_, cfg_->observation_side);
  const auto fresh = mapping::integrate_observation(belief_, visits_, observation_, pose_, cfg_->belief_update);
  for (const auto& s : fresh) {
    seen_truth_mass_ += map_->at(s.cell);
    discovered_mass_ += s.observed;
    if (map_->victim() && *map_->victim() == s.cell) victim_seen_ = true;
  }
}

double World::aoi_coverage() const {
  const double total = map_->total_mass();
  if (total <= 0.0) return 1.0;
  return std::min(1.0, seen_truth_mass_ / total);
}

double World::total_coverage() const {
  return static_cast<double>(belief_.seen_count()) / static_cast<double>(map_->cell_count());
}

AgentPose World::peek(Action a) const { return env::step(pose_, a, map_->width(), map_->height()); }

void World::advance(Action a) {
  pose_ = peek(a);
  ++steps_;
  sense();
}

std::array<double, 4> World::adjacency() const { return mapping::visited_adjacency(visits_, pose_, cfg_->visits); }

void World::navigation_input(Cell local_target, std::span<double> state, std::span<double> ego_map) const {
  const auto s = policy::navigation_state(observation_, adjacency(), pose_, local_target, cfg_->ablation);
  std::copy(s.begin(), s.end(), state.begin());
  if (cfg_->ablation.no_map) {
    std::fill(ego_map.begin(), ego_map.end(), 0.0);
  } else {
    mapping::extract_egocentric_into(belief_, pose_, cfg_->ego_side, ego_map);
  }
}

void World::exploration_input(std::span<double> state, std::span<double> ego_map) const {
  const auto s = policy::exploration_state(observation_, adjacency(), cfg_->ablation);
  std::copy(s.begin(), s.end(), state.begin());
  if (cfg_->ablation.no_map) {
    std::fill(ego_map.begin(), ego_map.end(), 0.0);
  } else {
    mapping::extract_egocentric_into(belief_, pose_, cfg_->ego_side, ego_map);
  }
}

}  // namespace adex::agents
