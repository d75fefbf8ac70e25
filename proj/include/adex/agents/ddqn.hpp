#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adex/agents/replay.hpp"
#include "adex/nn/adam.hpp"
#include "adex/nn/network.hpp"
#include "adex/rng.hpp"

namespace adex::agents {

struct DdqnConfig {
  double gamma = 0.95;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t buffer_capacity = 2000;
  std::size_t sync_period = 200;
  double clip_norm = 5.0;
  double huber_delta = 1.0;
  /// Environment steps between gradient updates.
  std::size_t train_every = 4;
  /// Transitions collected before the first update.
  std::size_t warmup = 200;
  EpsilonSchedule epsilon;
};

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> values);

/// Double-DQN target: the online network picks the successor action, the
/// target network scores it.
double td_target_double(double reward, bool terminal, std::span<const double> q_online_next,
                        std::span<const double> q_target_next, double gamma);

double huber(double error, double delta);
double huber_grad(double error, double delta);

/// Mean Huber loss of Q(s, a) against fixed targets.
double ddqn_loss(const nn::PolicyNetwork& net, std::span<const Transition* const> batch,
                 std::span<const double> targets, double delta);

/// Accumulates d(ddqn_loss)/d(params) into the network gradients. Returns the loss.
double ddqn_accumulate_gradients(nn::PolicyNetwork& net, std::span<const Transition* const> batch,
                                 std::span<const double> targets, double delta);

/// Recurrent double DQN over navigation windows.
class NavigationLearner {
 public:
  NavigationLearner(DdqnConfig cfg, bool recurrent, std::uint64_t seed);

  const DdqnConfig& config() const { return cfg_; }
  nn::PolicyNetwork& online() { return online_; }
  const nn::PolicyNetwork& online() const { return online_; }
  nn::PolicyNetwork& target() { return target_; }
  ReplayBuffer& buffer() { return buffer_; }
  std::size_t updates() const { return updates_; }
  double epsilon() const { return cfg_.epsilon.value(updates_); }

  std::size_t greedy_action(const nn::History& input) const;
  /// Epsilon-greedy.
  std::size_t act(const nn::History& input, Rng& rng) const;

  /// Stores the transition and, every train_every steps after warmup, runs
  /// one update. Returns the loss if an update ran.
  std::optional<double> observe(Transition t);

  /// One DDQN update on an explicit batch: Huber loss against double-Q
  /// targets, clipped gradients, one Adam step, epsilon advanced, hard target
  /// sync every sync_period updates. Throws TrainingError (parameters
  /// unchanged) on a non-finite loss or gradient.
  double update(std::span<const Transition* const> batch);

  /// Targets for a batch using the current online and target networks.
  std::vector<double> targets(std::span<const Transition* const> batch) const;

  /// Adopts the online parameters (e.g. after loading) for the target too.
  void sync_target();

 private:
  DdqnConfig cfg_;
  nn::PolicyNetwork online_;
  nn::PolicyNetwork target_;
  nn::AdamState adam_;
  ReplayBuffer buffer_;
  Rng rng_;
  std::size_t updates_ = 0;
  std::size_t observed_ = 0;
};

}  // namespace adex::agents
