#include "adex/baselines/baselines.hpp"

#include <string>

#include "adex/error.hpp"
#include "adex/policy/policy.hpp"

namespace adex::baselines {

Action sweeping_action(SweepState& state, AgentPose pose, int width, int height) {
  if (pose.y != state.row || !env::in_bounds(pose, width, height)) {
    throw ContractViolation("sweep: pose (" + std::to_string(pose.x) + "," + std::to_string(pose.y) +
                            ") is off row " + std::to_string(state.row));
  }
  const bool at_end = state.east ? pose.x == width - 1 : pose.x == 0;
  if (!at_end) return state.east ? Action::Right : Action::Left;
  if (height == 1) {
    state.east = !state.east;
    return width == 1 ? Action::Hover : (state.east ? Action::Right : Action::Left);
  }
  if (state.south ? state.row == height - 1 : state.row == 0) state.south = !state.south;
  state.east = !state.east;
  state.row += state.south ? 1 : -1;
  return state.south ? Action::Backward : Action::Forward;
}

metrics::EpisodeMetrics run_sweeping_episode(agents::World& world, const agents::EpisodeOptions& options) {
  metrics::EpisodeMetrics out;
  agents::MetricsRecorder recorder(out, world);
  const auto& cfg = world.config();
  SweepState state;
  state.row = world.pose().y;
  while (!agents::finished(world, options)) {
    const Action a = sweeping_action(state, world.pose(), world.map().width(), world.map().height());
    const double r =
        policy::reward_exploration(world.peek(a), world.belief(), world.visits(), cfg.reward, cfg.visits);
    world.advance(a);
    recorder.record(world, r);
  }
  return out;
}

Action random_action(Rng& rng) { return env::action_at(rng.below(env::kAllActions.size())); }

// ---------------------------------------------------------------------------

ForwardModel::ForwardModel(std::size_t state_dim, std::size_t hidden, double learning_rate, std::uint64_t seed)
    : state_dim_(state_dim),
      hidden_("forward.hidden", state_dim + env::kAllActions.size(), hidden, nn::Activation::relu),
      out_("forward.out", hidden, state_dim, nn::Activation::linear),
      learning_rate_(learning_rate) {
  if (!(learning_rate > 0.0)) throw ConfigError("forward model learning rate must be positive");
  Rng rng(seed);
  hidden_.init_glorot(rng);
  out_.init_glorot(rng);
}

nn::ParamList ForwardModel::parameters() {
  nn::ParamList p;
  hidden_.append_params(p);
  out_.append_params(p);
  return p;
}

std::vector<double> ForwardModel::input(std::span<const double> state, Action a) const {
  if (state.size() != state_dim_) throw ConfigError("forward model: wrong state width");
  std::vector<double> x(state.begin(), state.end());
  x.resize(state_dim_ + env::kAllActions.size(), 0.0);
  x[state_dim_ + env::index_of(a)] = 1.0;
  return x;
}

std::vector<double> ForwardModel::predict(std::span<const double> state, Action a) const {
  return out_.forward(hidden_.forward(input(state, a)));
}

double ForwardModel::error(std::span<const double> state, Action a, std::span<const double> next) const {
  const auto p = predict(state, a);
  double e = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) e += (p[i] - next[i]) * (p[i] - next[i]);
  return e;
}

double ForwardModel::learn(std::span<const double> state, Action a, std::span<const double> next) {
  const auto x = input(state, a);
  const auto h = hidden_.forward(x);
  const auto p = out_.forward(h);
  double e = 0.0;
  std::vector<double> dp(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    e += (p[i] - next[i]) * (p[i] - next[i]);
    dp[i] = 2.0 * (p[i] - next[i]);
  }
  const auto params = parameters();
  nn::zero_grad(params);
  std::vector<double> dh(h.size(), 0.0);
  out_.backward(h, p, dp, dh);
  hidden_.backward(x, h, dh, {});
  for (const auto& q : params) {
    const auto v = q.value->values();
    const auto g = q.grad->values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= learning_rate_ * g[i];
  }
  return e;
}

namespace {

nn::NetworkSpec compact(const char* name, std::size_t outputs, nn::Activation act) {
  return {name, policy::kExplStateSize, nn::kEgoMapSize, outputs, act, 1, false};
}

}  // namespace

CuriosityAgent::CuriosityAgent(const CuriosityConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      model_(policy::kExplStateSize, cfg.forward_hidden, cfg.forward_learning_rate, derive_seed(seed, 1)),
      policy_(cfg.a2c, compact("curiosity_actor", 5, nn::Activation::softmax),
              compact("curiosity_critic", 1, nn::Activation::linear), derive_seed(seed, 2)),
      rng_(derive_seed(seed, 3)) {}

nn::History CuriosityAgent::input(const agents::World& world) const {
  nn::History h(1, policy::kExplStateSize, nn::kEgoMapSize);
  world.exploration_input(h.mutable_states(), h.mutable_maps());
  return h;
}

Action CuriosityAgent::act(const agents::World& world) {
  current_ = input(world);
  current_state_.assign(current_.states().begin(), current_.states().end());
  return env::action_at(policy_.act(current_, rng_, true));
}

double CuriosityAgent::observe(const agents::World& world, Action a, bool last) {
  auto next = input(world);
  const double r_int = cfg_.intrinsic_scale * model_.learn(current_state_, a, next.states());
  rollout_.steps.push_back({std::move(current_), env::index_of(a), r_int});
  if (rollout_.steps.size() >= cfg_.a2c.rollout_length || last) {
    rollout_.terminal = false;
    rollout_.bootstrap = std::move(next);
    policy_.update(rollout_);
    rollout_.steps.clear();
  }
  return r_int;
}

metrics::EpisodeMetrics run_curiosity_episode(agents::World& world, const CuriosityConfig& cfg,
                                              const agents::EpisodeOptions& options, std::uint64_t seed) {
  metrics::EpisodeMetrics out;
  agents::MetricsRecorder recorder(out, world);
  CuriosityAgent agent(cfg, seed);
  while (!agents::finished(world, options)) {
    const Action a = agent.act(world);
    world.advance(a);
    const double r = agent.observe(world, a, agents::finished(world, options));
    recorder.record(world, r);
  }
  return out;
}

}  // namespace adex::baselines
