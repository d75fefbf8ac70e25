#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adex/nn/adam.hpp"
#include "adex/nn/network.hpp"
#include "adex/rng.hpp"

namespace adex::agents {

struct A2cConfig {
  double gamma = 0.95;
  double actor_learning_rate = 1e-5;
  double critic_learning_rate = 1e-5;
  std::size_t rollout_length = 5;
  double entropy_coef = 0.01;
  double clip_norm = 5.0;
  /// log pi(a|s) is evaluated as log(max(pi, floor)).
  double log_prob_floor = 1e-8;
};

struct RolloutStep {
  nn::History input;
  std::size_t action = 0;
  double reward = 0.0;
};

/// A short on-policy segment. When it was cut before a terminal state,
/// bootstrap holds the input of the state after the last step.
struct Rollout {
  std::vector<RolloutStep> steps;
  bool terminal = false;
  nn::History bootstrap;
};

struct A2cLosses {
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
};

/// n-step discounted returns, R_t = r_t + gamma R_{t+1}, seeded with
/// bootstrap_value (ignored if the rollout ended in a terminal state).
std::vector<double> n_step_returns(const Rollout& rollout, double bootstrap_value, double gamma);

/// Mean over the rollout of -log pi(a|s) A - c_H H(pi) with A = R - V(s)
/// held constant, and of (R - V(s))^2.
A2cLosses a2c_losses(const nn::PolicyNetwork& actor, const nn::PolicyNetwork& critic, const Rollout& rollout,
                     std::span<const double> returns, const A2cConfig& cfg);

/// Accumulates gradients of the two losses above into actor and critic.
A2cLosses a2c_accumulate_gradients(nn::PolicyNetwork& actor, nn::PolicyNetwork& critic, const Rollout& rollout,
                                   std::span<const double> returns, const A2cConfig& cfg);

/// Recurrent advantage actor-critic with separate actor and critic networks.
class ExplorationLearner {
 public:
  ExplorationLearner(A2cConfig cfg, bool recurrent, std::uint64_t seed);
  /// Variant with caller-provided networks (used by the curiosity baseline).
  ExplorationLearner(A2cConfig cfg, nn::NetworkSpec actor, nn::NetworkSpec critic, std::uint64_t seed);

  const A2cConfig& config() const { return cfg_; }
  nn::PolicyNetwork& actor() { return actor_; }
  const nn::PolicyNetwork& actor() const { return actor_; }
  nn::PolicyNetwork& critic() { return critic_; }
  std::size_t updates() const { return updates_; }

  std::vector<double> probabilities(const nn::History& input) const { return actor_.forward(input); }
  double value(const nn::History& input) const { return critic_.forward(input)[0]; }

  /// Samples from pi (training) or takes its argmax (evaluation).
  std::size_t act(const nn::History& input, Rng& rng, bool sample) const;

  /// One actor step and one critic step on the rollout.
  A2cLosses update(const Rollout& rollout);

 private:
  A2cConfig cfg_;
  nn::PolicyNetwork actor_;
  nn::PolicyNetwork critic_;
  nn::AdamState actor_adam_;
  nn::AdamState critic_adam_;
  std::size_t updates_ = 0;
};

/// Index drawn from a discrete distribution.
std::size_t sample_index(std::span<const double> probabilities, Rng& rng);

}  // namespace adex::agents
