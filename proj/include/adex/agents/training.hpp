#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adex/agents/episode.hpp"
#include "adex/env/scenario.hpp"

namespace adex::agents {

/// Maps drawn from one scenario spec with per-map seeds derived from a master.
std::vector<env::GroundTruthMap> generate_pool(const env::ScenarioSpec& spec, std::size_t count,
                                               std::uint64_t seed);

struct TrainingSchedule {
  std::size_t stage1_episodes = 400;
  std::size_t stage1_step_limit = 100;
  // Stage 1 only rewards arrival: the AoI bonus is dropped while pi_n learns to reach T_L.
  bool stage1_reach_only = true;
  std::size_t stage2_episodes = 50;
  std::size_t exploration_episodes = 100;
  std::size_t finetune_episodes = 100;
  std::size_t finetune_budget = 2000;
};

/// One line per finished training episode, for logs and curves.
struct TrainingEvent {
  std::string stage;
  std::size_t episode = 0;
  std::size_t steps = 0;
  double reward = 0.0;
  bool success = false;
};
using TrainingLog = std::function<void(const TrainingEvent&)>;

/// Stage 1: random start, random local target inside the egocentric window,
/// episode ends on arrival or after stage1_step_limit steps.
void train_navigation_local(Model& model, const EnvironmentConfig& env, const std::vector<env::GroundTruthMap>& maps,
                            const TrainingSchedule& schedule, std::uint64_t seed, const TrainingLog& log = {});

/// Stage 2: random start, random region centroid reached through a chain of
/// local targets within kappa_1 steps.
void train_navigation_global(Model& model, const EnvironmentConfig& env,
                             const std::vector<env::GroundTruthMap>& maps, const TrainingSchedule& schedule,
                             std::uint64_t seed, const TrainingLog& log = {});

/// Exploration phases from random starts, optimising the exploration reward.
void train_exploration(Model& model, const EnvironmentConfig& env, const std::vector<env::GroundTruthMap>& maps,
                       const TrainingSchedule& schedule, std::uint64_t seed, const TrainingLog& log = {});

/// Full cyclic episodes with both learners updating.
void joint_finetune(Model& model, const EnvironmentConfig& env, const std::vector<env::GroundTruthMap>& maps,
                    const TrainingSchedule& schedule, std::uint64_t seed, const TrainingLog& log = {});

struct LocalNavigationReport {
  std::size_t pairs = 0;
  std::size_t reached = 0;
  /// Sum of path lengths over sum of Manhattan distances, reached pairs only.
  double path_ratio = 0.0;
  double reach_rate() const { return pairs ? static_cast<double>(reached) / static_cast<double>(pairs) : 0.0; }
};

/// Greedy stage-1 evaluation on held-out (start, local target) pairs, each
/// capped at kappa_1 steps.
LocalNavigationReport evaluate_local_navigation(const Model& model, const EnvironmentConfig& env,
                                                const std::vector<env::GroundTruthMap>& maps, std::size_t pairs,
                                                std::uint64_t seed);

/// A start cell and a distinct local target inside the window around it.
std::pair<Cell, Cell> sample_local_task(const env::GroundTruthMap& map, int ego_side, Rng& rng);

}  // namespace adex::agents
