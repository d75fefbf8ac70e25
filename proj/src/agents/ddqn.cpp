#include "adex/agents/ddqn.hpp"

#include <algorithm>
#include <cmath>

#include "adex/error.hpp"

namespace adex::agents {

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

double td_target_double(double reward, bool terminal, std::span<const double> q_online_next,
                        std::span<const double> q_target_next, double gamma) {
  if (terminal) return reward;
  if (q_online_next.size() != q_target_next.size() || q_online_next.empty()) {
    throw ConfigError("double-Q target needs two Q vectors of equal length");
  }
  return reward + gamma * q_target_next[argmax(q_online_next)];
}

double huber(double error, double delta) {
  const double a = std::abs(error);
  return a <= delta ? 0.5 * error * error : delta * (a - 0.5 * delta);
}

double huber_grad(double error, double delta) { return std::clamp(error, -delta, delta); }

double ddqn_loss(const nn::PolicyNetwork& net, std::span<const Transition* const> batch,
                 std::span<const double> targets, double delta) {
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto q = net.forward(batch[i]->input);
    loss += huber(q[batch[i]->action] - targets[i], delta);
  }
  return loss / static_cast<double>(batch.size());
}

double ddqn_accumulate_gradients(nn::PolicyNetwork& net, std::span<const Transition* const> batch,
                                 std::span<const double> targets, double delta) {
  const double scale = 1.0 / static_cast<double>(batch.size());
  const std::size_t width = net.spec().output_dim;
  std::vector<const nn::History*> inputs;
  for (const auto* t : batch) inputs.push_back(&t->input);
  const auto trace = net.forward_batch(inputs);
  double loss = 0.0;
  std::vector<double> dq(batch.size() * width, 0.0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double err = trace.output_row(i)[batch[i]->action] - targets[i];
    loss += huber(err, delta);
    dq[i * width + batch[i]->action] = huber_grad(err, delta) * scale;
  }
  net.backward_batch(trace, dq);
  return loss * scale;
}

NavigationLearner::NavigationLearner(DdqnConfig cfg, bool recurrent, std::uint64_t seed)
    : cfg_(cfg),
      online_(nn::navigation_spec(recurrent)),
      target_(nn::navigation_spec(recurrent)),
      buffer_(cfg.buffer_capacity),
      rng_(derive_seed(seed, 0x6464716eULL)) {
  if (!(cfg_.gamma > 0.0 && cfg_.gamma < 1.0)) throw ConfigError("gamma must be in (0,1)");
  if (cfg_.batch_size == 0 || cfg_.batch_size > cfg_.buffer_capacity) {
    throw ConfigError("batch size must be in [1, buffer capacity]");
  }
  if (cfg_.train_every == 0 || cfg_.sync_period == 0) throw ConfigError("train_every and sync_period must be positive");
  Rng init(seed);
  online_.initialize(init);
  adam_ = nn::AdamState({cfg_.learning_rate}, online_.parameters());
  sync_target();
}

void NavigationLearner::sync_target() { target_.copy_parameters_from(online_); }

std::size_t NavigationLearner::greedy_action(const nn::History& input) const {
  return argmax(online_.forward(input));
}

std::size_t NavigationLearner::act(const nn::History& input, Rng& rng) const {
  if (rng.uniform() < epsilon()) return static_cast<std::size_t>(rng.below(online_.spec().output_dim));
  return greedy_action(input);
}

std::vector<double> NavigationLearner::targets(std::span<const Transition* const> batch) const {
  std::vector<double> y(batch.size());
  std::vector<const nn::History*> next;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i]->terminal) {
      y[i] = batch[i]->reward;
    } else {
      next.push_back(&batch[i]->next_input);
      rows.push_back(i);
    }
  }
  if (next.empty()) return y;
  const auto q_online = online_.forward_batch(next);
  const auto q_target = target_.forward_batch(next);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    y[rows[r]] = td_target_double(batch[rows[r]]->reward, false, q_online.output_row(r), q_target.output_row(r),
                                  cfg_.gamma);
  }
  return y;
}

double NavigationLearner::update(std::span<const Transition* const> batch) {
  if (batch.empty()) throw ConfigError("empty DDQN batch");
  const auto y = targets(batch);
  auto params = online_.parameters();
  nn::zero_grad(params);
  const double loss = ddqn_accumulate_gradients(online_, batch, y, cfg_.huber_delta);
  if (!std::isfinite(loss)) {
    nn::zero_grad(params);
    throw TrainingError("non-finite DDQN loss");
  }
  nn::clip_grad_norm(params, cfg_.clip_norm);
  adam_.step(params);
  ++updates_;
  if (updates_ % cfg_.sync_period == 0) sync_target();
  return loss;
}

std::optional<double> NavigationLearner::observe(Transition t) {
  buffer_.push(std::move(t));
  ++observed_;
  if (buffer_.size() < std::max(cfg_.warmup, cfg_.batch_size)) return std::nullopt;
  if (observed_ % cfg_.train_every != 0) return std::nullopt;
  const auto batch = buffer_.sample(cfg_.batch_size, rng_);
  return update(batch);
}

}  // namespace adex::agents
