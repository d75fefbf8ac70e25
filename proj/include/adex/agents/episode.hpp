#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "adex/agents/a2c.hpp"
#include "adex/agents/ddqn.hpp"
#include "adex/agents/world.hpp"
#include "adex/metrics.hpp"
#include "adex/nn/network.hpp"
#include "adex/rng.hpp"

namespace adex::agents {

/// Sliding window of per-step branch features for a frozen network, so each
/// decision costs one branch evaluation instead of five. Produces the same
/// bits as PolicyNetwork::forward on the equivalent History.
class FeatureWindow {
 public:
  explicit FeatureWindow(const nn::PolicyNetwork& net);

  void reset();
  void push(std::span<const double> state, std::span<const double> map);
  /// Re-encodes the newest slot in place.
  void replace_newest(std::span<const double> state, std::span<const double> map);
  std::vector<double> output() const;

 private:
  const nn::PolicyNetwork* net_;
  std::vector<double> padding_;
  std::vector<double> features_;
};

/// The two learned sub-policies plus everything needed to keep training them.
struct Model {
  Model(const DdqnConfig& ddqn, const A2cConfig& a2c, const policy::Ablation& ablation, std::uint64_t seed);

  policy::Ablation ablation;
  NavigationLearner navigation;
  ExplorationLearner exploration;
};

// Checkpoints: one WEIGHTS v1 file per artifact; parameter names carry the
// network prefix (nav., actor., critic.).
nn::ParamList navigation_params(Model& model);
nn::ParamList exploration_params(Model& model);
nn::ParamList model_params(Model& model);

void save_navigation(const std::filesystem::path& path, Model& model);
void load_navigation(const std::filesystem::path& path, Model& model);
void save_exploration(const std::filesystem::path& path, Model& model);
void load_exploration(const std::filesystem::path& path, Model& model);
void save_model(const std::filesystem::path& path, Model& model);
void load_model(const std::filesystem::path& path, Model& model);

/// Decision maker plugged into the cyclic explorer. The *_step hooks see the
/// world after the action has been applied.
class PhaseController {
 public:
  virtual ~PhaseController() = default;

  virtual void begin_navigation(const World& world, Cell local_target) = 0;
  virtual Action navigation_action(const World& world, Cell local_target) = 0;
  /// terminal: the step reached the local target (or T), which ends the
  /// sub-task the navigation network was conditioned on.
  virtual void navigation_step(const World& /*world*/, Action /*a*/, double /*reward*/, Cell /*local_target*/,
                               bool /*terminal*/, bool /*phase_over*/) {}

  virtual void begin_exploration(const World& world) = 0;
  virtual Action exploration_action(const World& world) = 0;
  virtual void exploration_step(const World& /*world*/, Action /*a*/, double /*reward*/, bool /*phase_over*/) {}
};

enum class Mode { train, eval };

/// The learned policies: DDQN for navigation, A2C actor for exploration.
/// Train mode explores (epsilon-greedy / sampling) and updates both learners;
/// eval mode is greedy and reuses cached branch features.
class ModelController final : public PhaseController {
 public:
  /// sample_actor: in eval mode, draw exploration actions from the actor's
  /// distribution (seeded) instead of taking its argmax.
  ModelController(Model& model, Mode mode, std::uint64_t seed, bool sample_actor = false);

  void begin_navigation(const World& world, Cell local_target) override;
  Action navigation_action(const World& world, Cell local_target) override;
  void navigation_step(const World& world, Action a, double reward, Cell local_target, bool terminal,
                       bool phase_over) override;

  void begin_exploration(const World& world) override;
  Action exploration_action(const World& world) override;
  void exploration_step(const World& world, Action a, double reward, bool phase_over) override;

  /// Finishes a partially filled A2C rollout (e.g. when the budget runs out).
  void flush();

 private:
  void push_navigation(const World& world, Cell local_target, bool replace);
  void push_exploration(const World& world);

  Model* model_;
  Mode mode_;
  bool sample_actor_;
  Rng rng_;
  nn::History nav_history_;
  nn::History expl_history_;
  std::unique_ptr<FeatureWindow> nav_window_;
  std::unique_ptr<FeatureWindow> expl_window_;
  Cell history_target_;
  Rollout rollout_;
  std::vector<double> state_buf_;
  std::vector<double> map_buf_;
};

/// Uniformly random actions inside the same phase framework.
class RandomController final : public PhaseController {
 public:
  explicit RandomController(std::uint64_t seed) : rng_(seed) {}

  void begin_navigation(const World&, Cell) override {}
  Action navigation_action(const World&, Cell) override;
  void begin_exploration(const World&) override {}
  Action exploration_action(const World&) override;

 private:
  Rng rng_;
};

/// Appends a metrics row per step.
class MetricsRecorder {
 public:
  MetricsRecorder(metrics::EpisodeMetrics& out, const World& world);
  void record(const World& world, double reward);

 private:
  metrics::EpisodeMetrics* out_;
};

struct EpisodeOptions {
  std::size_t budget = 8000;
  /// End the episode once the victim has entered the field of view.
  bool stop_at_victim = true;
};

/// Budget spent, or the victim found when the options ask to stop there.
bool finished(const World& world, const EpisodeOptions& options);

/// Drives toward target through a chain of local targets until
/// navigation_done or the episode ends. Returns the steps taken.
std::size_t navigate(World& world, PhaseController& controller, Cell target, std::size_t step_limit,
                     const EpisodeOptions& options, MetricsRecorder* recorder = nullptr);

/// One exploration phase, ended by exploration_done or the episode end.
std::size_t explore(World& world, PhaseController& controller, const EpisodeOptions& options,
                    MetricsRecorder* recorder = nullptr);

/// Target selection, navigation until navigation_done, exploration until
/// exploration_done, repeated until the step budget is spent.
metrics::EpisodeMetrics run_full_episode(World& world, PhaseController& controller, const EpisodeOptions& options);

}  // namespace adex::agents
