#include "adex/agents/training.hpp"

#include <cstdlib>

#include "adex/error.hpp"

namespace adex::agents {

std::vector<env::GroundTruthMap> generate_pool(const env::ScenarioSpec& spec, std::size_t count,
                                               std::uint64_t seed) {
  std::vector<env::GroundTruthMap> maps;
  maps.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto s = spec;
    s.seed = derive_seed(seed, i);
    maps.push_back(env::generate_scenario(s));
  }
  return maps;
}

namespace {

const env::GroundTruthMap& pick(const std::vector<env::GroundTruthMap>& maps, Rng& rng) {
  if (maps.empty()) throw ConfigError("training needs at least one map");
  return maps[rng.below(maps.size())];
}

Cell random_cell(const env::GroundTruthMap& map, Rng& rng) {
  return {static_cast<int>(rng.below(static_cast<std::uint64_t>(map.width()))),
          static_cast<int>(rng.below(static_cast<std::uint64_t>(map.height())))};
}

double reward_since(const metrics::EpisodeMetrics& m) { return m.total_reward(); }

/// Navigation with rewards tallied, no stop at the victim.
struct NavRun {
  std::size_t steps = 0;
  double reward = 0.0;
  bool reached = false;
};

NavRun run_navigation(World& world, PhaseController& controller, Cell target, std::size_t limit) {
  metrics::EpisodeMetrics m;
  MetricsRecorder recorder(m, world);
  EpisodeOptions options;
  options.budget = world.steps() + limit;
  options.stop_at_victim = false;
  NavRun run;
  run.steps = navigate(world, controller, target, limit, options, &recorder);
  run.reward = reward_since(m);
  run.reached = world.pose() == target;
  return run;
}

}  // namespace

std::pair<Cell, Cell> sample_local_task(const env::GroundTruthMap& map, int ego_side, Rng& rng) {
  const int half = ego_side / 2;
  for (;;) {
    const Cell start = random_cell(map, rng);
    const int x0 = std::max(0, start.x - half);
    const int x1 = std::min(map.width() - 1, start.x + half);
    const int y0 = std::max(0, start.y - half);
    const int y1 = std::min(map.height() - 1, start.y + half);
    const Cell goal{x0 + static_cast<int>(rng.below(static_cast<std::uint64_t>(x1 - x0 + 1))),
                    y0 + static_cast<int>(rng.below(static_cast<std::uint64_t>(y1 - y0 + 1)))};
    if (goal != start) return {start, goal};
  }
}

void train_navigation_local(Model& model, const EnvironmentConfig& env, const std::vector<env::GroundTruthMap>& maps,
                            const TrainingSchedule& schedule, std::uint64_t seed, const TrainingLog& log) {
  validate(env);
  auto local_env = env;
  if (schedule.stage1_reach_only) local_env.reward.aoi = 0.0;
  Rng rng(derive_seed(seed, 0x7331));
  ModelController controller(model, Mode::train, derive_seed(seed, 0x7332));
  for (std::size_t e = 0; e < schedule.stage1_episodes; ++e) {
    const auto& map = pick(maps, rng);
    const auto [start, goal] = sample_local_task(map, env.ego_side, rng);
    World world(map, start, local_env);
    const auto run = run_navigation(world, controller, goal, schedule.stage1_step_limit);
    if (log) log({"nav-local", e, run.steps, run.reward, run.reached});
  }
}

void train_navigation_global(Model& model, const EnvironmentConfig& env,
                             const std::vector<env::GroundTruthMap>& maps, const TrainingSchedule& schedule,
                             std::uint64_t seed, const TrainingLog& log) {
  validate(env);
  Rng rng(derive_seed(seed, 0x7341));
  ModelController controller(model, Mode::train, derive_seed(seed, 0x7342));
  for (std::size_t e = 0; e < schedule.stage2_episodes; ++e) {
    const auto& map = pick(maps, rng);
    const auto grid = mapping::segment_regions(map.width(), map.height(), env.region_side);
    const Cell target = grid[rng.below(grid.size())].centroid;
    Cell start = random_cell(map, rng);
    while (start == target) start = random_cell(map, rng);
    World world(map, start, env);
    const auto run = run_navigation(world, controller, target, env.nav_step_limit);
    if (log) log({"nav-global", e, run.steps, run.reward, run.reached});
  }
}

void train_exploration(Model& model, const EnvironmentConfig& env, const std::vector<env::GroundTruthMap>& maps,
                       const TrainingSchedule& schedule, std::uint64_t seed, const TrainingLog& log) {
  validate(env);
  Rng rng(derive_seed(seed, 0x7351));
  ModelController controller(model, Mode::train, derive_seed(seed, 0x7352));
  for (std::size_t e = 0; e < schedule.exploration_episodes; ++e) {
    const auto& map = pick(maps, rng);
    World world(map, random_cell(map, rng), env);
    metrics::EpisodeMetrics m;
    MetricsRecorder recorder(m, world);
    EpisodeOptions options;
    options.budget = env.expl_step_limit;
    options.stop_at_victim = false;
    const auto steps = explore(world, controller, options, &recorder);
    if (log) log({"explore", e, steps, m.total_reward(), m.final_aoi_coverage() > 0.0});
  }
}

void joint_finetune(Model& model, const EnvironmentConfig& env, const std::vector<env::GroundTruthMap>& maps,
                    const TrainingSchedule& schedule, std::uint64_t seed, const TrainingLog& log) {
  validate(env);
  Rng rng(derive_seed(seed, 0x7361));
  ModelController controller(model, Mode::train, derive_seed(seed, 0x7362));
  for (std::size_t e = 0; e < schedule.finetune_episodes; ++e) {
    const auto& map = pick(maps, rng);
    World world(map, random_cell(map, rng), env);
    EpisodeOptions options;
    options.budget = schedule.finetune_budget;
    options.stop_at_victim = false;
    const auto m = run_full_episode(world, controller, options);
    if (log) log({"finetune", e, m.steps(), m.total_reward(), m.final_aoi_coverage() >= 0.7});
  }
}

LocalNavigationReport evaluate_local_navigation(const Model& model, const EnvironmentConfig& env,
                                                const std::vector<env::GroundTruthMap>& maps, std::size_t pairs,
                                                std::uint64_t seed) {
  validate(env);
  Rng rng(derive_seed(seed, 0x7371));
  // Eval mode never mutates the model.
  ModelController controller(const_cast<Model&>(model), Mode::eval, derive_seed(seed, 0x7372));
  LocalNavigationReport report;
  long path = 0;
  long manhattan = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto& map = pick(maps, rng);
    const auto [start, goal] = sample_local_task(map, env.ego_side, rng);
    World world(map, start, env);
    const auto run = run_navigation(world, controller, goal, env.nav_step_limit);
    ++report.pairs;
    if (run.reached) {
      ++report.reached;
      path += static_cast<long>(run.steps);
      manhattan += std::abs(goal.x - start.x) + std::abs(goal.y - start.y);
    }
  }
  report.path_ratio = manhattan > 0 ? static_cast<double>(path) / static_cast<double>(manhattan) : 0.0;
  return report;
}

}  // namespace adex::agents
