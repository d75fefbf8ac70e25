// Command-line front end: map generation, training stages, evaluation,
// rendering and the ablation matrix.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adex/env/map_io.hpp"
#include "adex/error.hpp"
#include "adex/harness/config.hpp"
#include "adex/harness/experiment.hpp"
#include "adex/harness/render.hpp"

namespace fs = std::filesystem;
using namespace adex;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Experiment config (key = value lines)");
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
  cmd->add_option("--set", c.overrides, "Extra key=value setting, applied after the config")->take_all();
}

harness::ExperimentConfig build_config(const Common& c) {
  harness::ExperimentConfig cfg;
  if (!c.config.empty()) cfg = harness::load_config(c.config);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    harness::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) cfg.seed = *c.seed;
  harness::validate(cfg);
  return cfg;
}

/// Progress on stderr: one line per `every` episodes of a stage.
class ProgressLog {
 public:
  explicit ProgressLog(std::size_t every) : every_(every) {}

  void operator()(const agents::TrainingEvent& e) {
    auto& s = stages_[e.stage];
    ++s.n;
    s.steps += e.steps;
    s.reward += e.reward;
    s.success += e.success ? 1 : 0;
    if (s.n == every_) {
      std::fprintf(stderr, "%-10s ep %6zu  success %.2f  steps %.1f  reward %.2f\n", e.stage.c_str(), e.episode + 1,
                   static_cast<double>(s.success) / s.n, static_cast<double>(s.steps) / s.n, s.reward / s.n);
      s = {};
    }
  }

 private:
  struct Window {
    std::size_t n = 0, steps = 0, success = 0;
    double reward = 0.0;
  };
  std::size_t every_;
  std::map<std::string, Window> stages_;
};

agents::Model fresh_model(const harness::ExperimentConfig& cfg) {
  return agents::Model(cfg.ddqn, cfg.a2c, cfg.env.ablation, derive_seed(cfg.seed, harness::kModelStream));
}

void require_file(const std::string& path, const char* what) {
  if (!fs::exists(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive AoI exploration workbench"};
  app.require_subcommand(1);

  Common common;
  std::string out;
  std::size_t count = 0;
  std::string stage = "both";
  std::string init, nav, expl, policy, weights, weights_dir, map_file, csv_file;
  bool render = false;
  int scale = 4;
  std::size_t log_every = 50;

  auto* generate = app.add_subcommand("generate", "Write evaluation maps as AOIMAP v1 files");
  add_common(generate, common);
  generate->add_option("--out", out, "Output directory")->required();
  generate->add_option("--count", count, "Number of maps (default maps.count)");

  auto* train_nav = app.add_subcommand("train-nav", "Train the navigation network (stage 1, stage 2 or both)");
  add_common(train_nav, common);
  train_nav->add_option("--out", out, "Output weights file")->required();
  train_nav->add_option("--stage", stage, "local, global or both")->check(CLI::IsMember({"local", "global", "both"}));
  train_nav->add_option("--init", init, "Navigation weights to continue from");
  train_nav->add_option("--log-every", log_every, "Episodes per progress line");

  auto* train_expl = app.add_subcommand("train-explore", "Train the exploration actor-critic");
  add_common(train_expl, common);
  train_expl->add_option("--out", out, "Output weights file")->required();
  train_expl->add_option("--log-every", log_every, "Episodes per progress line");

  auto* finetune = app.add_subcommand("finetune", "Joint training on full episodes; writes the model file");
  add_common(finetune, common);
  finetune->add_option("--nav", nav, "Navigation weights")->required();
  finetune->add_option("--explore", expl, "Exploration weights")->required();
  finetune->add_option("--out", out, "Output model file")->required();
  finetune->add_option("--log-every", log_every, "Episodes per progress line");

  auto* run = app.add_subcommand("run", "Evaluation experiment: per-episode CSVs and a summary");
  add_common(run, common);
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--policy", policy, "model, sweeping, random or curiosity");
  run->add_option("--weights", weights, "Model file for policy=model");
  run->add_flag("--render", render, "Also write one PPM per episode");

  auto* rend = app.add_subcommand("render", "Render a trajectory CSV over its map");
  rend->add_option("--map", map_file, "AOIMAP file")->required();
  rend->add_option("--csv", csv_file, "Episode metrics CSV")->required();
  rend->add_option("--out", out, "Output PPM")->required();
  rend->add_option("--scale", scale, "Pixels per cell");

  auto* ablate = app.add_subcommand("ablate", "Train and evaluate the full model and each ablation");
  add_common(ablate, common);
  ablate->add_option("--out", out, "Output directory")->required();
  ablate->add_option("--weights-dir", weights_dir, "Use <variant>.weights from here instead of training");
  ablate->add_option("--log-every", log_every, "Episodes per progress line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*generate) {
      auto cfg = build_config(common);
      if (count > 0) cfg.map_count = count;
      cfg.map_files.clear();
      const auto maps = harness::evaluation_maps(cfg);
      fs::create_directories(out);
      for (std::size_t i = 0; i < maps.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "map_%03zu.aoimap", i);
        env::save_map(fs::path(out) / name, maps[i]);
      }
      std::cout << "wrote " << maps.size() << " maps to " << out << "\n";
    } else if (*train_nav) {
      const auto cfg = build_config(common);
      auto model = fresh_model(cfg);
      if (!init.empty()) {
        require_file(init, "initial weights");
        agents::load_navigation(init, model);
      }
      const auto maps = harness::training_maps(cfg);
      ProgressLog log(log_every);
      const auto seed = derive_seed(cfg.seed, harness::kModelStream + 1);
      if (stage != "global") agents::train_navigation_local(model, cfg.env, maps, cfg.schedule, derive_seed(seed, 1), std::ref(log));
      if (stage != "local") agents::train_navigation_global(model, cfg.env, maps, cfg.schedule, derive_seed(seed, 2), std::ref(log));
      agents::save_navigation(out, model);
      const auto report = agents::evaluate_local_navigation(model, cfg.env, maps, 100, derive_seed(seed, 9));
      std::cout << "local navigation: reach rate " << report.reach_rate() << ", path/manhattan "
                << report.path_ratio << "\n";
    } else if (*train_expl) {
      const auto cfg = build_config(common);
      auto model = fresh_model(cfg);
      const auto maps = harness::training_maps(cfg);
      ProgressLog log(log_every);
      agents::train_exploration(model, cfg.env, maps, cfg.schedule,
                                derive_seed(derive_seed(cfg.seed, harness::kModelStream + 1), 3), std::ref(log));
      agents::save_exploration(out, model);
    } else if (*finetune) {
      const auto cfg = build_config(common);
      require_file(nav, "navigation weights");
      require_file(expl, "exploration weights");
      auto model = fresh_model(cfg);
      agents::load_navigation(nav, model);
      agents::load_exploration(expl, model);
      ProgressLog log(log_every);
      agents::joint_finetune(model, cfg.env, harness::training_maps(cfg), cfg.schedule,
                             derive_seed(derive_seed(cfg.seed, harness::kModelStream + 1), 4), std::ref(log));
      agents::save_model(out, model);
    } else if (*run) {
      auto cfg = build_config(common);
      if (!policy.empty()) cfg.run.policy = harness::parse_policy(policy);
      if (!weights.empty()) cfg.run.weights = weights;
      if (render) cfg.run.render = true;
      const auto results = harness::run_experiment(cfg, out);
      std::cout << "wrote " << results.size() << " episodes to " << out << "\n";
    } else if (*rend) {
      const auto map = env::load_map(map_file);
      const auto metrics = harness::read_episode_csv(csv_file);
      harness::render_trajectory(map, metrics, out, scale);
    } else if (*ablate) {
      const auto cfg = build_config(common);
      ProgressLog log(log_every);
      std::optional<fs::path> dir;
      if (!weights_dir.empty()) dir = weights_dir;
      harness::run_ablation(cfg, out, dir, std::ref(log));
      std::cout << "ablation results in " << out << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
