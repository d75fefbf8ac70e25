#include "adex/harness/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <ostream>

#include "adex/env/map_io.hpp"
#include "adex/error.hpp"
#include "adex/harness/render.hpp"

namespace adex::harness {

std::vector<env::GroundTruthMap> evaluation_maps(const ExperimentConfig& cfg) {
  if (!cfg.map_files.empty()) {
    std::vector<env::GroundTruthMap> maps;
    for (const auto& f : cfg.map_files) maps.push_back(env::load_map(f));
    return maps;
  }
  return agents::generate_pool(cfg.scenario, cfg.map_count, derive_seed(cfg.seed, kEvalMapStream));
}

std::vector<env::GroundTruthMap> training_maps(const ExperimentConfig& cfg) {
  return agents::generate_pool(cfg.scenario, cfg.training_maps, derive_seed(cfg.seed, kTrainMapStream));
}

env::AgentPose start_pose(StartRule rule, const env::GroundTruthMap& map, Rng& rng) {
  switch (rule) {
    case StartRule::corner: return {0, 0};
    case StartRule::center: return {map.width() / 2, map.height() / 2};
    case StartRule::random:
      return {static_cast<int>(rng.below(static_cast<std::uint64_t>(map.width()))),
              static_cast<int>(rng.below(static_cast<std::uint64_t>(map.height())))};
  }
  return {0, 0};
}

metrics::EpisodeMetrics run_episode(const ExperimentConfig& cfg, const env::GroundTruthMap& map,
                                    const agents::Model* model, std::uint64_t seed) {
  Rng rng(seed);
  const auto start = start_pose(cfg.run.start, map, rng);
  agents::World world(map, start, cfg.env);
  agents::EpisodeOptions options;
  options.budget = cfg.run.budget;
  options.stop_at_victim = cfg.run.stop_at_victim;
  switch (cfg.run.policy) {
    case PolicyKind::model: {
      if (!model) throw ConfigError("policy=model needs trained weights");
      // Eval mode reads the networks only.
      agents::ModelController controller(const_cast<agents::Model&>(*model), agents::Mode::eval, rng.next(),
                                         cfg.run.sample_actor);
      return agents::run_full_episode(world, controller, options);
    }
    case PolicyKind::random: {
      agents::RandomController controller(rng.next());
      return agents::run_full_episode(world, controller, options);
    }
    case PolicyKind::sweeping: return baselines::run_sweeping_episode(world, options);
    case PolicyKind::curiosity: return baselines::run_curiosity_episode(world, cfg.curiosity, options, rng.next());
  }
  throw ConfigError("unknown policy");
}

std::vector<EpisodeResult> run_episodes(const ExperimentConfig& cfg, const std::vector<env::GroundTruthMap>& maps,
                                        const agents::Model* model) {
  if (cfg.run.policy == PolicyKind::model && !model) throw ConfigError("policy=model needs trained weights");
  const std::size_t n = maps.size() * cfg.run.repeats;
  std::vector<EpisodeResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  const std::uint64_t base = derive_seed(cfg.seed, kEpisodeStream);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    const auto k = static_cast<std::size_t>(i);
    auto& r = results[k];
    r.episode = k;
    r.map = k / cfg.run.repeats;
    r.repeat = k % cfg.run.repeats;
    r.seed = derive_seed(base, k);
    try {
      r.metrics = run_episode(cfg, maps[r.map], model, r.seed);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

agents::Model load_model_for(const ExperimentConfig& cfg) {
  if (cfg.run.weights.empty()) throw ConfigError("policy=model needs run.weights (or --weights)");
  if (!std::filesystem::exists(cfg.run.weights)) {
    throw ConfigError("weights file not found: " + cfg.run.weights.string());
  }
  agents::Model model(cfg.ddqn, cfg.a2c, cfg.env.ablation, derive_seed(cfg.seed, kModelStream));
  agents::load_model(cfg.run.weights, model);
  return model;
}

agents::Model train_model(const ExperimentConfig& cfg, const agents::TrainingLog& log) {
  validate(cfg);
  agents::Model model(cfg.ddqn, cfg.a2c, cfg.env.ablation, derive_seed(cfg.seed, kModelStream));
  const auto maps = training_maps(cfg);
  const auto seed = derive_seed(cfg.seed, kModelStream + 1);
  agents::train_navigation_local(model, cfg.env, maps, cfg.schedule, derive_seed(seed, 1), log);
  agents::train_navigation_global(model, cfg.env, maps, cfg.schedule, derive_seed(seed, 2), log);
  agents::train_exploration(model, cfg.env, maps, cfg.schedule, derive_seed(seed, 3), log);
  agents::joint_finetune(model, cfg.env, maps, cfg.schedule, derive_seed(seed, 4), log);
  return model;
}

// ---------------------------------------------------------------------------

std::string format9(double v) {
  char buf[40];
  // Adding zero folds -0 into 0 so the text never shows a signed zero.
  std::snprintf(buf, sizeof buf, "%.9g", v + 0.0);
  return buf;
}

double round9(double v) { return std::strtod(format9(v).c_str(), nullptr); }

void write_episode_csv(std::ostream& out, const EpisodeResult& r) {
  out << "episode,step,x,y,aoi_cov,total_cov,reward\n";
  for (const auto& row : r.metrics.rows) {
    out << r.episode << ',' << row.step << ',' << row.x << ',' << row.y << ',' << format9(row.aoi_coverage) << ','
        << format9(row.total_coverage) << ',' << format9(row.reward) << '\n';
  }
}

EpisodeStats episode_stats(const EpisodeResult& r) {
  EpisodeStats s;
  const auto& rows = r.metrics.rows;
  std::vector<double> aoi;
  aoi.reserve(rows.size());
  for (const auto& row : rows) {
    aoi.push_back(round9(row.aoi_coverage));
    s.total_reward += round9(row.reward);
  }
  s.steps = r.metrics.steps();
  s.threshold_steps = metrics::threshold_steps(aoi, metrics::kCoverageThresholds);
  if (!rows.empty()) {
    s.final_aoi = aoi.back();
    s.final_total = round9(rows.back().total_coverage);
  }
  if (r.metrics.victim_step) s.victim_step = static_cast<long>(*r.metrics.victim_step);
  return s;
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  a.count = values.size();
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - a.mean) * (v - a.mean);
  a.std = std::sqrt(sq / static_cast<double>(values.size()));
  return a;
}

void write_episode_table(std::ostream& out, const std::vector<EpisodeResult>& results) {
  out << "episode,map,repeat,seed,steps,steps_to_30,steps_to_50,steps_to_70,final_aoi_cov,final_total_cov,"
         "total_reward,victim_step\n";
  for (const auto& r : results) {
    const auto s = episode_stats(r);
    out << r.episode << ',' << r.map << ',' << r.repeat << ',' << r.seed << ',' << s.steps;
    for (long t : s.threshold_steps) out << ',' << t;
    out << ',' << format9(s.final_aoi) << ',' << format9(s.final_total) << ',' << format9(s.total_reward) << ','
        << s.victim_step << '\n';
  }
}

void write_summary(std::ostream& out, const std::string& label, const std::vector<EpisodeResult>& results) {
  std::vector<EpisodeStats> stats;
  for (const auto& r : results) stats.push_back(episode_stats(r));

  std::vector<std::pair<std::string, std::vector<double>>> columns;
  static const char* kThresholdNames[] = {"steps_to_30", "steps_to_50", "steps_to_70"};
  for (std::size_t t = 0; t < metrics::kCoverageThresholds.size(); ++t) {
    std::vector<double> v;
    for (const auto& s : stats) {
      if (s.threshold_steps[t] >= 0) v.push_back(static_cast<double>(s.threshold_steps[t]));
    }
    columns.emplace_back(kThresholdNames[t], std::move(v));
  }
  std::vector<double> aoi, total, reward, steps, victim;
  for (const auto& s : stats) {
    aoi.push_back(s.final_aoi);
    total.push_back(s.final_total);
    reward.push_back(s.total_reward);
    steps.push_back(static_cast<double>(s.steps));
    if (s.victim_step >= 0) victim.push_back(static_cast<double>(s.victim_step));
  }
  columns.emplace_back("final_aoi_cov", std::move(aoi));
  columns.emplace_back("final_total_cov", std::move(total));
  columns.emplace_back("total_reward", std::move(reward));
  columns.emplace_back("steps", std::move(steps));
  columns.emplace_back("steps_to_victim", std::move(victim));

  out << "label,episodes";
  for (const auto& [name, _] : columns) out << ',' << name << "_mean," << name << "_std," << name << "_count";
  out << '\n' << label << ',' << results.size();
  for (const auto& [_, values] : columns) {
    const auto a = aggregate(values);
    out << ',' << format9(a.mean) << ',' << format9(a.std) << ',' << a.count;
  }
  out << '\n';
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string numbered(const char* prefix, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%03zu%s", prefix, i, ext);
  return buf;
}

void write_outputs(const ExperimentConfig& cfg, const std::vector<env::GroundTruthMap>& maps,
                   const std::vector<EpisodeResult>& results, const std::filesystem::path& out_dir,
                   const std::string& label) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  for (const auto& r : results) {
    auto out = open_out(out_dir / numbered("episode_", r.episode, ".csv"));
    write_episode_csv(out, r);
    if (cfg.run.render) {
      render_trajectory(maps[r.map], r.metrics, out_dir / numbered("episode_", r.episode, ".ppm"),
                        cfg.run.render_scale);
    }
  }
  auto table = open_out(out_dir / "episodes.csv");
  write_episode_table(table, results);
  auto summary = open_out(out_dir / "summary.csv");
  write_summary(summary, label, results);
}

}  // namespace

std::vector<EpisodeResult> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  validate(cfg);
  std::optional<agents::Model> model;
  if (cfg.run.policy == PolicyKind::model) model.emplace(load_model_for(cfg));
  const auto maps = evaluation_maps(cfg);
  auto results = run_episodes(cfg, maps, model ? &*model : nullptr);
  write_outputs(cfg, maps, results, out_dir, to_string(cfg.run.policy));
  return results;
}

std::vector<AblationVariant> ablation_variants() {
  return {{"full", {}},
          {"no_visits", {true, false, false}},
          {"no_map", {false, true, false}},
          {"no_lstm", {false, false, true}}};
}

void run_ablation(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                  const std::optional<std::filesystem::path>& weights_dir, const agents::TrainingLog& log) {
  validate(cfg);
  const auto maps = evaluation_maps(cfg);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  auto table = open_out(out_dir / "ablation.csv");
  table << "variant,episodes,final_aoi_cov_mean,final_aoi_cov_std,final_total_cov_mean\n";
  for (const auto& variant : ablation_variants()) {
    auto vcfg = cfg;
    vcfg.run.policy = PolicyKind::model;
    vcfg.env.ablation = variant.flags;
    std::optional<agents::Model> model;
    if (weights_dir) {
      vcfg.run.weights = *weights_dir / (variant.name + ".weights");
      model.emplace(load_model_for(vcfg));
    } else {
      model.emplace(train_model(vcfg, log));
      agents::save_model(out_dir / (variant.name + ".weights"), *model);
    }
    const auto results = run_episodes(vcfg, maps, &*model);
    write_outputs(vcfg, maps, results, out_dir / variant.name, variant.name);
    std::vector<double> aoi, total;
    for (const auto& r : results) {
      const auto s = episode_stats(r);
      aoi.push_back(s.final_aoi);
      total.push_back(s.final_total);
    }
    const auto a = aggregate(aoi);
    table << variant.name << ',' << results.size() << ',' << format9(a.mean) << ',' << format9(a.std) << ','
          << format9(aggregate(total).mean) << '\n';
  }
}

}  // namespace adex::harness
