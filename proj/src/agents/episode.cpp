#include "adex/agents/episode.hpp"

#include <algorithm>

#include "adex/error.hpp"
#include "adex/nn/weights_io.hpp"

namespace adex::agents {

FeatureWindow::FeatureWindow(const nn::PolicyNetwork& net) : net_(&net) {
  const auto& spec = net.spec();
  const std::vector<double> zero_state(spec.state_dim, 0.0);
  const std::vector<double> zero_map(spec.map_dim, 0.0);
  padding_ = net.encode(zero_state, zero_map);
  reset();
}

void FeatureWindow::reset() {
  features_.clear();
  for (std::size_t t = 0; t < net_->spec().history; ++t) {
    features_.insert(features_.end(), padding_.begin(), padding_.end());
  }
}

void FeatureWindow::push(std::span<const double> state, std::span<const double> map) {
  const auto f = net_->encode(state, map);
  std::copy(features_.begin() + nn::kFused, features_.end(), features_.begin());
  std::copy(f.begin(), f.end(), features_.end() - nn::kFused);
}

void FeatureWindow::replace_newest(std::span<const double> state, std::span<const double> map) {
  const auto f = net_->encode(state, map);
  std::copy(f.begin(), f.end(), features_.end() - nn::kFused);
}

std::vector<double> FeatureWindow::output() const { return net_->decide(features_); }

Model::Model(const DdqnConfig& ddqn, const A2cConfig& a2c, const policy::Ablation& abl, std::uint64_t seed)
    : ablation(abl),
      navigation(ddqn, !abl.no_lstm, derive_seed(seed, 1)),
      exploration(a2c, !abl.no_lstm, derive_seed(seed, 2)) {}

nn::ParamList navigation_params(Model& model) { return model.navigation.online().parameters(); }

nn::ParamList exploration_params(Model& model) {
  auto params = model.exploration.actor().parameters();
  const auto critic = model.exploration.critic().parameters();
  params.insert(params.end(), critic.begin(), critic.end());
  return params;
}

nn::ParamList model_params(Model& model) {
  auto params = navigation_params(model);
  const auto expl = exploration_params(model);
  params.insert(params.end(), expl.begin(), expl.end());
  return params;
}

void save_navigation(const std::filesystem::path& path, Model& model) {
  nn::save_weights(path, navigation_params(model));
}

void load_navigation(const std::filesystem::path& path, Model& model) {
  nn::load_weights(path, navigation_params(model));
  model.navigation.sync_target();
}

void save_exploration(const std::filesystem::path& path, Model& model) {
  nn::save_weights(path, exploration_params(model));
}

void load_exploration(const std::filesystem::path& path, Model& model) {
  nn::load_weights(path, exploration_params(model));
}

void save_model(const std::filesystem::path& path, Model& model) { nn::save_weights(path, model_params(model)); }

void load_model(const std::filesystem::path& path, Model& model) {
  nn::load_weights(path, model_params(model));
  model.navigation.sync_target();
}

// ---------------------------------------------------------------------------

ModelController::ModelController(Model& model, Mode mode, std::uint64_t seed, bool sample_actor)
    : model_(&model),
      mode_(mode),
      sample_actor_(sample_actor),
      rng_(seed),
      nav_history_(nn::kHistoryLength, policy::kNavStateSize, nn::kEgoMapSize),
      expl_history_(nn::kHistoryLength, policy::kExplStateSize, nn::kEgoMapSize),
      map_buf_(nn::kEgoMapSize) {
  if (mode_ == Mode::eval) {
    nav_window_ = std::make_unique<FeatureWindow>(model.navigation.online());
    expl_window_ = std::make_unique<FeatureWindow>(model.exploration.actor());
  }
}

void ModelController::push_navigation(const World& world, Cell local_target, bool replace) {
  state_buf_.resize(policy::kNavStateSize);
  world.navigation_input(local_target, state_buf_, map_buf_);
  if (nav_window_) {
    if (replace) {
      nav_window_->replace_newest(state_buf_, map_buf_);
    } else {
      nav_window_->push(state_buf_, map_buf_);
    }
  } else if (replace) {
    auto states = nav_history_.mutable_states();
    std::copy(state_buf_.begin(), state_buf_.end(), states.end() - static_cast<std::ptrdiff_t>(state_buf_.size()));
  } else {
    nav_history_.push(state_buf_, map_buf_);
  }
  history_target_ = local_target;
}

void ModelController::push_exploration(const World& world) {
  state_buf_.resize(policy::kExplStateSize);
  world.exploration_input(state_buf_, map_buf_);
  if (expl_window_) {
    expl_window_->push(state_buf_, map_buf_);
  } else {
    expl_history_.push(state_buf_, map_buf_);
  }
}

void ModelController::begin_navigation(const World& world, Cell local_target) {
  if (nav_window_) nav_window_->reset();
  nav_history_.clear();
  push_navigation(world, local_target, false);
}

Action ModelController::navigation_action(const World& world, Cell local_target) {
  // A new local target only changes the (dx, dy) entries of the newest slot.
  if (local_target != history_target_) push_navigation(world, local_target, true);
  if (nav_window_) return env::action_at(argmax(nav_window_->output()));
  return env::action_at(model_->navigation.act(nav_history_, rng_));
}

void ModelController::navigation_step(const World& world, Action a, double reward, Cell local_target,
                                      bool terminal, bool /*phase_over*/) {
  if (mode_ == Mode::eval) {
    push_navigation(world, local_target, false);
    return;
  }
  Transition t;
  t.input = nav_history_;
  t.action = env::index_of(a);
  t.reward = reward;
  t.terminal = terminal;
  push_navigation(world, local_target, false);
  t.next_input = nav_history_;
  model_->navigation.observe(std::move(t));
}

void ModelController::begin_exploration(const World& world) {
  flush();
  if (expl_window_) expl_window_->reset();
  expl_history_.clear();
  push_exploration(world);
}

Action ModelController::exploration_action(const World& /*world*/) {
  if (expl_window_) {
    const auto p = expl_window_->output();
    return env::action_at(sample_actor_ ? sample_index(p, rng_) : argmax(p));
  }
  return env::action_at(model_->exploration.act(expl_history_, rng_, true));
}

void ModelController::exploration_step(const World& world, Action a, double reward, bool phase_over) {
  if (mode_ == Mode::eval) {
    push_exploration(world);
    return;
  }
  rollout_.steps.push_back({expl_history_, env::index_of(a), reward});
  push_exploration(world);
  if (rollout_.steps.size() >= model_->exploration.config().rollout_length || phase_over) flush();
}

void ModelController::flush() {
  if (rollout_.steps.empty()) return;
  // The phase boundary is not a terminal state of the world, so every
  // rollout bootstraps from the state that follows it.
  rollout_.terminal = false;
  rollout_.bootstrap = expl_history_;
  model_->exploration.update(rollout_);
  rollout_.steps.clear();
}

Action RandomController::navigation_action(const World&, Cell) {
  return env::action_at(rng_.below(env::kAllActions.size()));
}

Action RandomController::exploration_action(const World&) {
  return env::action_at(rng_.below(env::kAllActions.size()));
}

// ---------------------------------------------------------------------------

MetricsRecorder::MetricsRecorder(metrics::EpisodeMetrics& out, const World& world) : out_(&out) {
  out_->rows.clear();
  out_->targets.clear();
  out_->victim_step.reset();
  record(world, 0.0);
}

void MetricsRecorder::record(const World& world, double reward) {
  const auto p = world.pose();
  out_->rows.push_back({world.steps(), p.x, p.y, world.aoi_coverage(), world.total_coverage(), reward});
  if (world.victim_seen() && !out_->victim_step) out_->victim_step = world.steps();
}

bool finished(const World& world, const EpisodeOptions& options) {
  if (world.steps() >= options.budget) return true;
  return options.stop_at_victim && world.map().victim() && world.victim_seen();
}

std::size_t navigate(World& world, PhaseController& controller, Cell target, std::size_t step_limit,
                     const EpisodeOptions& options, MetricsRecorder* recorder) {
  const auto& cfg = world.config();
  const auto& map = world.map();
  std::size_t steps = 0;
  if (policy::navigation_done(world.pose(), target, 0, step_limit) || finished(world, options)) return 0;
  Cell local = policy::select_local_target(target, world.pose(), cfg.ego_side, map.width(), map.height());
  controller.begin_navigation(world, local);
  for (;;) {
    const Action a = controller.navigation_action(world, local);
    const Cell x = world.peek(a);
    const double r =
        policy::reward_navigation(x, world.belief(), world.visits(), cfg.reward, local, target, cfg.visits) +
        policy::navigation_shaping(world.pose(), x, local, cfg.reward);
    world.advance(a);
    ++steps;
    const bool reached_local = world.pose() == local;
    const bool over =
        policy::navigation_done(world.pose(), target, steps, step_limit) || finished(world, options);
    controller.navigation_step(world, a, r, local, reached_local || world.pose() == target, over);
    if (recorder) recorder->record(world, r);
    if (over) return steps;
    if (reached_local) local = policy::select_local_target(target, world.pose(), cfg.ego_side, map.width(), map.height());
  }
}

std::size_t explore(World& world, PhaseController& controller, const EpisodeOptions& options,
                    MetricsRecorder* recorder) {
  const auto& cfg = world.config();
  if (finished(world, options)) return 0;
  std::vector<double> mass{world.discovered_mass()};
  std::size_t steps = 0;
  controller.begin_exploration(world);
  for (;;) {
    const Action a = controller.exploration_action(world);
    const Cell x = world.peek(a);
    const double r = policy::reward_exploration(x, world.belief(), world.visits(), cfg.reward, cfg.visits);
    world.advance(a);
    ++steps;
    mass.push_back(world.discovered_mass());
    const bool over =
        policy::exploration_done(mass, steps, cfg.expl_step_limit, cfg.stagnation) || finished(world, options);
    controller.exploration_step(world, a, r, over);
    if (recorder) recorder->record(world, r);
    if (over) return steps;
  }
}

metrics::EpisodeMetrics run_full_episode(World& world, PhaseController& controller, const EpisodeOptions& options) {
  metrics::EpisodeMetrics out;
  MetricsRecorder recorder(out, world);
  const auto& cfg = world.config();
  const auto& map = world.map();
  const auto grid = mapping::segment_regions(map.width(), map.height(), cfg.region_side);

  while (!finished(world, options)) {
    const auto assignment =
        policy::select_target(grid, world.belief(), world.visits(), world.pose(), cfg.weights, cfg.ego_side);
    out.targets.push_back(assignment.target);
    navigate(world, controller, assignment.target, cfg.nav_step_limit, options, &recorder);
    explore(world, controller, options, &recorder);
  }
  return out;
}

}  // namespace adex::agents
