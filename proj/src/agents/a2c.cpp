#include "adex/agents/a2c.hpp"

#include <algorithm>
#include <cmath>

#include "adex/agents/ddqn.hpp"
#include "adex/error.hpp"

namespace adex::agents {

std::vector<double> n_step_returns(const Rollout& rollout, double bootstrap_value, double gamma) {
  std::vector<double> returns(rollout.steps.size());
  double running = rollout.terminal ? 0.0 : bootstrap_value;
  for (std::size_t t = rollout.steps.size(); t-- > 0;) {
    running = rollout.steps[t].reward + gamma * running;
    returns[t] = running;
  }
  return returns;
}

namespace {

double entropy(std::span<const double> p, double floor) {
  double h = 0.0;
  for (double v : p) h -= v * std::log(std::max(v, floor));
  return h;
}

}  // namespace

A2cLosses a2c_losses(const nn::PolicyNetwork& actor, const nn::PolicyNetwork& critic, const Rollout& rollout,
                     std::span<const double> returns, const A2cConfig& cfg) {
  A2cLosses out;
  const double n = static_cast<double>(rollout.steps.size());
  for (std::size_t t = 0; t < rollout.steps.size(); ++t) {
    const auto& step = rollout.steps[t];
    const auto probs = actor.forward(step.input);
    const double v = critic.forward(step.input)[0];
    const double advantage = returns[t] - v;
    const double h = entropy(probs, cfg.log_prob_floor);
    out.policy += (-std::log(std::max(probs[step.action], cfg.log_prob_floor)) * advantage - cfg.entropy_coef * h) / n;
    out.value += advantage * advantage / n;
    out.entropy += h / n;
  }
  return out;
}

A2cLosses a2c_accumulate_gradients(nn::PolicyNetwork& actor, nn::PolicyNetwork& critic, const Rollout& rollout,
                                   std::span<const double> returns, const A2cConfig& cfg) {
  if (rollout.steps.empty()) throw ConfigError("empty rollout");
  if (returns.size() != rollout.steps.size()) throw ConfigError("returns do not match rollout length");
  A2cLosses out;
  const std::size_t count = rollout.steps.size();
  const double n = static_cast<double>(count);
  const std::size_t actions = actor.spec().output_dim;
  std::vector<const nn::History*> inputs;
  for (const auto& step : rollout.steps) inputs.push_back(&step.input);
  const auto actor_trace = actor.forward_batch(inputs);
  const auto critic_trace = critic.forward_batch(inputs);
  std::vector<double> dp(count * actions), dv(count);
  for (std::size_t t = 0; t < count; ++t) {
    const auto& step = rollout.steps[t];
    const auto p = actor_trace.output_row(t);
    const double v = critic_trace.output[t];
    const double advantage = returns[t] - v;
    const double h = entropy(p, cfg.log_prob_floor);
    const double pa = p[step.action];
    out.policy += (-std::log(std::max(pa, cfg.log_prob_floor)) * advantage - cfg.entropy_coef * h) / n;
    out.value += advantage * advantage / n;
    out.entropy += h / n;

    // d/dp of -A log p_a (zero below the floor) and of -c_H * H(p).
    double* d = dp.data() + t * actions;
    for (std::size_t j = 0; j < actions; ++j) {
      const double pj = p[j];
      d[j] = cfg.entropy_coef * (pj > cfg.log_prob_floor ? std::log(pj) + 1.0 : std::log(cfg.log_prob_floor)) / n;
    }
    if (pa > cfg.log_prob_floor) d[step.action] += -advantage / pa / n;
    dv[t] = -2.0 * advantage / n;
  }
  actor.backward_batch(actor_trace, dp);
  critic.backward_batch(critic_trace, dv);
  return out;
}

std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    if (u < acc) return i;
  }
  return probabilities.size() - 1;
}

ExplorationLearner::ExplorationLearner(A2cConfig cfg, bool recurrent, std::uint64_t seed)
    : ExplorationLearner(cfg, nn::actor_spec(recurrent), nn::critic_spec(recurrent), seed) {}

ExplorationLearner::ExplorationLearner(A2cConfig cfg, nn::NetworkSpec actor, nn::NetworkSpec critic,
                                       std::uint64_t seed)
    : cfg_(cfg), actor_(std::move(actor)), critic_(std::move(critic)) {
  if (!(cfg_.gamma > 0.0 && cfg_.gamma < 1.0)) throw ConfigError("gamma must be in (0,1)");
  if (cfg_.rollout_length == 0) throw ConfigError("rollout length must be positive");
  if (actor_.spec().output != nn::Activation::softmax) throw ConfigError("actor must end in softmax");
  if (critic_.spec().output_dim != 1) throw ConfigError("critic must output one value");
  Rng init(seed);
  actor_.initialize(init);
  critic_.initialize(init);
  actor_adam_ = nn::AdamState({cfg_.actor_learning_rate}, actor_.parameters());
  critic_adam_ = nn::AdamState({cfg_.critic_learning_rate}, critic_.parameters());
}

std::size_t ExplorationLearner::act(const nn::History& input, Rng& rng, bool sample) const {
  const auto p = actor_.forward(input);
  return sample ? sample_index(p, rng) : argmax(p);
}

A2cLosses ExplorationLearner::update(const Rollout& rollout) {
  const double bootstrap = rollout.terminal ? 0.0 : value(rollout.bootstrap);
  const auto returns = n_step_returns(rollout, bootstrap, cfg_.gamma);
  auto actor_params = actor_.parameters();
  auto critic_params = critic_.parameters();
  nn::zero_grad(actor_params);
  nn::zero_grad(critic_params);
  const A2cLosses losses = a2c_accumulate_gradients(actor_, critic_, rollout, returns, cfg_);
  if (!std::isfinite(losses.policy) || !std::isfinite(losses.value)) {
    throw TrainingError("non-finite A2C loss");
  }
  nn::clip_grad_norm(actor_params, cfg_.clip_norm);
  nn::clip_grad_norm(critic_params, cfg_.clip_norm);
  actor_adam_.step(actor_params);
  critic_adam_.step(critic_params);
  ++updates_;
  return losses;
}

}  // namespace adex::agents
