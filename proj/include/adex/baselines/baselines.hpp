#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adex/agents/a2c.hpp"
#include "adex/agents/episode.hpp"
#include "adex/nn/adam.hpp"
#include "adex/nn/dense.hpp"

namespace adex::baselines {

using env::Action;
using env::AgentPose;
using env::Cell;

// ---------------------------------------------------------------------------
// Sweeping

/// Boustrophedon from the top-left corner: east along the row, one step
/// south, west, one step south, and so on. After the last row the sweep
/// turns round and retraces the map northwards.
struct SweepState {
  bool east = true;
  bool south = true;
  int row = 0;
};

/// Next action of the sweep. Throws ContractViolation if pose is not on the
/// row the sweep is currently working.
Action sweeping_action(SweepState& state, AgentPose pose, int width, int height);

/// Sweep over the whole budget (no phase framework).
metrics::EpisodeMetrics run_sweeping_episode(agents::World& world, const agents::EpisodeOptions& options);

// ---------------------------------------------------------------------------
// Random

/// Uniform over the five actions, independent of state.
Action random_action(Rng& rng);

// ---------------------------------------------------------------------------
// Curiosity

struct CuriosityConfig {
  std::size_t forward_hidden = 64;
  double forward_learning_rate = 1e-2;
  double intrinsic_scale = 1.0;
  agents::A2cConfig a2c{0.95, 1e-4, 1e-4, 5, 0.01, 5.0, 1e-8};
};

/// Forward-dynamics model: (exploration state, one-hot action) -> predicted
/// next exploration state.
class ForwardModel {
 public:
  ForwardModel(std::size_t state_dim, std::size_t hidden, double learning_rate, std::uint64_t seed);

  std::vector<double> predict(std::span<const double> state, Action a) const;
  /// Squared prediction error, the intrinsic reward.
  double error(std::span<const double> state, Action a, std::span<const double> next) const;
  /// One plain gradient step on the squared error. Returns the error before
  /// the step. No momentum, so a repeated transition never gets worse.
  double learn(std::span<const double> state, Action a, std::span<const double> next);

  nn::ParamList parameters();

 private:
  std::vector<double> input(std::span<const double> state, Action a) const;

  std::size_t state_dim_;
  nn::DenseLayer hidden_;
  nn::DenseLayer out_;
  double learning_rate_;
};

/// Agent driven purely by prediction error: a compact actor-critic (one-step
/// history, no recurrence) trained online with A2C on r_int.
class CuriosityAgent {
 public:
  CuriosityAgent(const CuriosityConfig& cfg, std::uint64_t seed);

  Action act(const agents::World& world);
  /// Observes the outcome of the last act(), learns, returns r_int.
  double observe(const agents::World& world, Action a, bool last);

  ForwardModel& forward_model() { return model_; }

 private:
  nn::History input(const agents::World& world) const;

  CuriosityConfig cfg_;
  ForwardModel model_;
  agents::ExplorationLearner policy_;
  Rng rng_;
  nn::History current_;
  std::vector<double> current_state_;
  agents::Rollout rollout_;
};

/// Curiosity exploration of the whole map over the budget, learning online
/// from a fresh agent.
metrics::EpisodeMetrics run_curiosity_episode(agents::World& world, const CuriosityConfig& cfg,
                                              const agents::EpisodeOptions& options, std::uint64_t seed);

}  // namespace adex::baselines
