// Acceptance suite: one PASS/FAIL line per criterion. Thresholds are pinned
// below; the trained-model criteria run on the desk-scale config.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adex/agents/replay.hpp"
#include "adex/agents/training.hpp"
#include "adex/baselines/baselines.hpp"
#include "adex/harness/config.hpp"
#include "adex/harness/experiment.hpp"
#include "adex/mapping/regions.hpp"
#include "gradcheck.hpp"

namespace fs = std::filesystem;
using namespace adex;

namespace {

// ---------------------------------------------------------------------------
// Pinned thresholds

constexpr double kGradTolerance = 1e-4;
constexpr int kGradConfigs = 100;
constexpr double kGradSeconds = 120.0;

constexpr std::size_t kNavPairs = 100;
constexpr double kNavReachRate = 0.9;
constexpr double kNavPathRatio = 1.5;
constexpr double kNavMinutes = 30.0;

// AoI level for the efficiency comparison ("explored 63% of the map to cover 70%").
constexpr double kEfficiencyLevel = 0.7;
// The model has to reach that level in most episodes for the average to mean anything.
constexpr double kEfficiencyMinShare = 0.8;

constexpr std::size_t kAblationBudget = 2000;
constexpr double kAblationMargin = 0.05;

constexpr std::size_t kVictimMaps = 10;
constexpr std::size_t kVictimMapsRequired = 8;

// ---------------------------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void progress(const std::string& msg) { std::cerr << "  .. " << msg << std::endl; }

// ---------------------------------------------------------------------------
// 1. Gradients

Outcome gradient_suite() {
  using adex::testing::GradCheckResult;
  const auto t0 = std::chrono::steady_clock::now();
  GradCheckResult total;
  std::size_t configs = 0;
  auto merge = [&](const GradCheckResult& r, const std::string& what) {
    total.checked += r.checked;
    total.kinks += r.kinks;
    if (r.worst > total.worst) {
      total.worst = r.worst;
      total.worst_name = what + " " + r.worst_name;
    }
    ++configs;
  };
  Rng rng(1001);
  for (const auto act : {nn::Activation::relu, nn::Activation::tanh, nn::Activation::linear, nn::Activation::softmax}) {
    for (int i = 0; i < kGradConfigs; ++i) merge(adex::testing::check_dense(rng, act), "dense");
  }
  for (int i = 0; i < kGradConfigs; ++i) merge(adex::testing::check_lstm(rng), "lstm");
  for (int i = 0; i < kGradConfigs; ++i) {
    nn::NetworkSpec spec;
    spec.name = "net";
    spec.state_dim = 1 + rng.below(6);
    spec.map_dim = 1 + rng.below(9);
    spec.output = rng.below(2) ? nn::Activation::softmax : nn::Activation::linear;
    spec.output_dim = (spec.output == nn::Activation::softmax ? 2 : 1) + rng.below(5);
    spec.history = 1 + rng.below(5);
    spec.recurrent = rng.below(2) == 1;
    merge(adex::testing::check_network(spec, rng, 6), "network");
  }
  for (const bool recurrent : {true, false}) {
    for (const auto& spec : {nn::navigation_spec(recurrent), nn::actor_spec(recurrent), nn::critic_spec(recurrent)}) {
      merge(adex::testing::check_network(spec, rng, 24), spec.name);
    }
  }
  const double secs = seconds_since(t0);
  const bool kinks_rare = total.kinks <= total.checked / 20;
  Outcome o;
  o.pass = total.worst < kGradTolerance && secs < kGradSeconds && kinks_rare;
  o.detail = fmt("%zu configurations, %zu entries, worst relative error %.2e (%s), %zu kink skips, %.1f s", configs,
                 total.checked, total.worst, total.worst_name.c_str(), total.kinks, secs);
  return o;
}

// ---------------------------------------------------------------------------
// 2. Determinism through the CLI

int run_cli(const std::string& cli, const std::string& args, const fs::path& log) {
  const std::string cmd = cli + " " + args + " >>" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  const auto root = work / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto cfg = root / "tiny.cfg";
  std::ofstream(cfg) << "seed = 11\n"
                        "scenario.width = 30\nscenario.height = 30\nscenario.blob_sigma = 3\n"
                        "env.region_side = 10\nreward.shaping = 1\n"
                        "maps.count = 2\nrun.repeats = 2\nrun.budget = 300\n"
                        "train.maps = 2\ntrain.stage1_episodes = 6\ntrain.stage2_episodes = 2\n"
                        "train.exploration_episodes = 2\ntrain.finetune_episodes = 1\ntrain.finetune_budget = 150\n"
                        "ddqn.warmup = 64\n";
  const std::string c = " --config " + cfg.string();
  const auto log = root / "cli.log";
  std::vector<std::string> failures;
  for (const char* run : {"a", "b"}) {
    const auto d = root / run;
    const std::string o = d.string();
    const std::vector<std::string> steps = {
        "generate" + c + " --out " + o + "/maps",
        "train-nav" + c + " --out " + o + "/nav.weights",
        "train-explore" + c + " --out " + o + "/explore.weights",
        "finetune" + c + " --nav " + o + "/nav.weights --explore " + o + "/explore.weights --out " + o +
            "/model.weights",
        "run" + c + " --policy model --weights " + o + "/model.weights --render --out " + o + "/model",
        "run" + c + " --policy sweeping --render --out " + o + "/sweeping",
        "run" + c + " --policy random --set scenario.kind=sar-victim --out " + o + "/random",
        "run" + c + " --policy curiosity --out " + o + "/curiosity",
        "render --map " + o + "/maps/map_000.aoimap --csv " + o + "/model/episode_000.csv --out " + o + "/again.ppm",
        "ablate" + c + " --set run.budget=100 --out " + o + "/ablate",
    };
    for (const auto& s : steps) {
      if (run_cli(cli, s, log) != 0) failures.push_back("exit status of: " + s.substr(0, s.find(' ')));
    }
  }
  std::size_t files = 0;
  std::set<std::string> kinds;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    kinds.insert(e.path().extension().string());
    const auto other = root / "b" / fs::relative(e.path(), root / "a");
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
      failures.push_back("differs: " + fs::relative(e.path(), root / "a").string());
    }
  }
  for (const char* ext : {".aoimap", ".weights", ".csv", ".ppm"}) {
    if (!kinds.count(ext)) failures.push_back(std::string("no ") + ext + " output");
  }
  Outcome o;
  o.pass = failures.empty();
  o.detail = fmt("%zu files compared across two full CLI runs", files);
  if (!failures.empty()) o.detail += "; first problem: " + failures.front();
  return o;
}

// ---------------------------------------------------------------------------
// 3. Mechanics

Outcome mechanics() {
  std::vector<std::string> failures;

  // Sweeping visits every cell exactly once in W*H-1 moves on several shapes.
  for (const auto& [w, h] : {std::pair{60, 60}, std::pair{37, 23}, std::pair{5, 41}}) {
    const env::GroundTruthMap map(w, h, std::vector<double>(static_cast<std::size_t>(w) * h, 0.0));
    agents::EnvironmentConfig env;
    env.region_side = std::min(w, h);
    agents::World world(map, {0, 0}, env);
    const std::size_t moves = static_cast<std::size_t>(w) * h - 1;
    const auto m = baselines::run_sweeping_episode(world, {moves, false});
    bool once = world.visits().total() == moves + 1;
    for (const auto c : world.visits().counts()) once = once && c == 1;
    if (!once || m.final_total_coverage() != 1.0) failures.push_back(fmt("sweeping %dx%d", w, h));
  }

  const agents::EpsilonSchedule eps;
  for (std::size_t k = 0; k < 5000; ++k) {
    if (eps.value(k) != std::max(0.95 * std::pow(0.99, static_cast<double>(k)), 0.01)) {
      failures.push_back(fmt("epsilon at k=%zu", k));
      break;
    }
  }

  agents::ReplayBuffer buffer;
  for (std::size_t k = 0; k < 5000; ++k) {
    agents::Transition t;
    t.reward = static_cast<double>(k);
    buffer.push(std::move(t));
  }
  bool fifo = buffer.capacity() == 2000 && buffer.size() == 2000;
  for (std::size_t i = 0; fifo && i < buffer.size(); ++i) fifo = buffer.at(i).reward == static_cast<double>(3000 + i);
  if (!fifo) failures.push_back("replay FIFO");

  // Coverage series never decrease, for every policy.
  harness::ExperimentConfig cfg;
  cfg.scenario.width = cfg.scenario.height = 40;
  cfg.scenario.blob_sigma = 3.0;
  cfg.env.region_side = 10;
  cfg.map_count = 3;
  cfg.run.repeats = 2;
  cfg.run.budget = 1500;
  const auto maps = harness::evaluation_maps(cfg);
  for (const auto p : {harness::PolicyKind::random, harness::PolicyKind::sweeping, harness::PolicyKind::curiosity}) {
    cfg.run.policy = p;
    for (const auto& r : harness::run_episodes(cfg, maps, nullptr)) {
      const auto& rows = r.metrics.rows;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].aoi_coverage < rows[i - 1].aoi_coverage || rows[i].total_coverage < rows[i - 1].total_coverage) {
          failures.push_back("coverage decreased under " + harness::to_string(p));
          break;
        }
      }
    }
  }

  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(200)), h = 1 + static_cast<int>(rng.below(200));
    const int side = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(w, h))));
    const auto grid = mapping::segment_regions(w, h, side);
    std::vector<int> owners(static_cast<std::size_t>(w) * h, 0);
    long area = 0;
    for (const auto& r : grid.regions()) {
      area += r.area();
      for (int y = r.y0; y < r.y1; ++y)
        for (int x = r.x0; x < r.x1; ++x) ++owners[static_cast<std::size_t>(y) * w + x];
    }
    if (area != static_cast<long>(w) * h || std::any_of(owners.begin(), owners.end(), [](int n) { return n != 1; })) {
      failures.push_back(fmt("partition %dx%d side %d", w, h, side));
      break;
    }
  }

  Outcome o;
  o.pass = failures.empty();
  o.detail = failures.empty() ? "sweeping, epsilon, replay FIFO, coverage monotonicity, region partition"
                              : "failed: " + failures.front();
  return o;
}

// ---------------------------------------------------------------------------
// Trained-model criteria

struct Suite {
  harness::ExperimentConfig cfg;
  std::vector<env::GroundTruthMap> maps;
  fs::path work;
  bool reuse = false;
};

agents::TrainingLog stage_log() {
  return [](const agents::TrainingEvent& e) {
    if ((e.episode + 1) % 50 == 0) progress(fmt("%s episode %zu", e.stage.c_str(), e.episode + 1));
  };
}

/// Trains the remaining stages after stage 1, or loads a cached model.
agents::Model finish_training(const harness::ExperimentConfig& cfg, agents::Model model, const fs::path& cache,
                              bool reuse) {
  if (reuse && fs::exists(cache)) {
    agents::load_model(cache, model);
    return model;
  }
  const auto maps = harness::training_maps(cfg);
  const auto seed = derive_seed(cfg.seed, harness::kModelStream + 1);
  const auto log = stage_log();
  agents::train_navigation_global(model, cfg.env, maps, cfg.schedule, derive_seed(seed, 2), log);
  agents::train_exploration(model, cfg.env, maps, cfg.schedule, derive_seed(seed, 3), log);
  agents::joint_finetune(model, cfg.env, maps, cfg.schedule, derive_seed(seed, 4), log);
  agents::save_model(cache, model);
  return model;
}

agents::Model train_variant(const harness::ExperimentConfig& cfg, const fs::path& cache, bool reuse) {
  agents::Model model(cfg.ddqn, cfg.a2c, cfg.env.ablation, derive_seed(cfg.seed, harness::kModelStream));
  if (reuse && fs::exists(cache)) {
    agents::load_model(cache, model);
    return model;
  }
  model = harness::train_model(cfg, stage_log());
  agents::save_model(cache, model);
  return model;
}

// 4. Stage-1 navigation on held-out maps; returns the stage-1 model for the rest of training.
Outcome navigation(const Suite& s, std::optional<agents::Model>& stage1) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& cfg = s.cfg;
  agents::Model model(cfg.ddqn, cfg.a2c, cfg.env.ablation, derive_seed(cfg.seed, harness::kModelStream));
  const auto seed = derive_seed(cfg.seed, harness::kModelStream + 1);
  agents::train_navigation_local(model, cfg.env, harness::training_maps(cfg), cfg.schedule, derive_seed(seed, 1),
                                 stage_log());
  const auto report =
      agents::evaluate_local_navigation(model, cfg.env, s.maps, kNavPairs, derive_seed(cfg.seed, 0x6e617665));
  const double minutes = seconds_since(t0) / 60.0;
  stage1.emplace(std::move(model));
  Outcome o;
  o.pass = report.reach_rate() >= kNavReachRate && report.path_ratio <= kNavPathRatio && minutes <= kNavMinutes;
  o.detail = fmt("reach rate %.2f (>= %.2f), path/manhattan %.3f (<= %.2f), %zu stage-1 episodes, %.1f min",
                 report.reach_rate(), kNavReachRate, report.path_ratio, kNavPathRatio, cfg.schedule.stage1_episodes,
                 minutes);
  return o;
}

using Results = std::vector<harness::EpisodeResult>;

Results evaluate(const Suite& s, harness::PolicyKind policy, const agents::Model* model,
                 const std::function<void(harness::ExperimentConfig&)>& tweak = {}) {
  auto cfg = s.cfg;
  cfg.run.policy = policy;
  if (tweak) tweak(cfg);
  return harness::run_episodes(cfg, s.maps, model);
}

/// Mean first step reaching the level; episodes that never reach it count
/// as the full budget (a lower bound on their true value).
double censored_steps(const Results& rs, std::size_t threshold, std::size_t budget, std::size_t& reached) {
  double sum = 0.0;
  reached = 0;
  for (const auto& r : rs) {
    const long t = harness::episode_stats(r).threshold_steps[threshold];
    if (t >= 0) ++reached;
    sum += t >= 0 ? static_cast<double>(t) : static_cast<double>(budget);
  }
  return sum / static_cast<double>(rs.size());
}

// 5. Ordering of steps to 30% AoI coverage.
Outcome ordering(const std::map<std::string, Results>& runs, std::size_t budget) {
  const char* order[] = {"model", "sweeping", "random", "curiosity"};
  std::vector<double> means;
  std::string detail;
  for (const char* name : order) {
    std::size_t reached = 0;
    means.push_back(censored_steps(runs.at(name), 0, budget, reached));
    detail += fmt("%s%s %.1f (%zu/%zu reached)", detail.empty() ? "" : ", ", name, means.back(), reached,
                  runs.at(name).size());
  }
  Outcome o;
  o.pass = means[0] < means[1] && means[1] < means[2] && means[2] < means[3];
  o.detail = "mean steps to 30% AoI: " + detail;
  return o;
}

std::optional<double> total_at(const metrics::EpisodeMetrics& m, double level) {
  for (const auto& row : m.rows) {
    if (harness::round9(row.aoi_coverage) >= level) return harness::round9(row.total_coverage);
  }
  return std::nullopt;
}

// 6. Map coverage spent to reach the same AoI coverage.
Outcome efficiency(const Results& model, const Results& sweeping) {
  double m_sum = 0.0, s_sum = 0.0;
  std::size_t both = 0, model_reached = 0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto m = total_at(model[i].metrics, kEfficiencyLevel);
    const auto s = total_at(sweeping[i].metrics, kEfficiencyLevel);
    if (m) ++model_reached;
    if (m && s) {
      m_sum += *m;
      s_sum += *s;
      ++both;
    }
  }
  Outcome o;
  const double share = static_cast<double>(model_reached) / static_cast<double>(model.size());
  const double m_mean = both ? m_sum / both : 1.0, s_mean = both ? s_sum / both : 0.0;
  o.pass = both > 0 && share >= kEfficiencyMinShare && m_mean < s_mean;
  o.detail = fmt("map coverage at %.0f%% AoI: model %.3f vs sweeping %.3f over %zu episodes (model reached it in %.0f%%)",
                 100 * kEfficiencyLevel, m_mean, s_mean, both, 100 * share);
  return o;
}

double mean_final_aoi(const Results& rs) {
  double sum = 0.0;
  for (const auto& r : rs) sum += harness::episode_stats(r).final_aoi;
  return sum / static_cast<double>(rs.size());
}

// 7. Ablations at a fixed budget.
Outcome ablations(const Suite& s, const agents::Model& full) {
  std::map<std::string, double> cov;
  const auto budget = [](harness::ExperimentConfig& c) { c.run.budget = kAblationBudget; };
  for (const auto& v : harness::ablation_variants()) {
    auto cfg = s.cfg;
    cfg.env.ablation = v.flags;
    if (v.name == "full") {
      cov[v.name] = mean_final_aoi(evaluate(s, harness::PolicyKind::model, &full, budget));
      continue;
    }
    progress("training ablation " + v.name);
    const auto model = train_variant(cfg, s.work / (v.name + ".weights"), s.reuse);
    Suite vs = s;
    vs.cfg = cfg;
    cov[v.name] = mean_final_aoi(evaluate(vs, harness::PolicyKind::model, &model, budget));
  }
  const double f = cov["full"];
  Outcome o;
  o.pass = f - cov["no_visits"] >= kAblationMargin && f - cov["no_map"] >= kAblationMargin &&
           f - cov["no_lstm"] >= kAblationMargin && cov["no_lstm"] > cov["no_visits"] &&
           cov["no_lstm"] > cov["no_map"];
  o.detail = fmt("mean AoI coverage at %zu steps: full %.3f, no_lstm %.3f, no_visits %.3f, no_map %.3f",
                 kAblationBudget, f, cov["no_lstm"], cov["no_visits"], cov["no_map"]);
  return o;
}

// 8. Victim search.
Outcome victim_search(const Suite& s, const agents::Model& model) {
  Suite vs = s;
  vs.cfg.scenario.kind = env::ScenarioKind::sar_victim;
  vs.cfg.map_count = kVictimMaps;
  vs.cfg.map_files.clear();
  vs.cfg.run.stop_at_victim = true;
  vs.maps = harness::evaluation_maps(vs.cfg);
  const auto budget = static_cast<double>(vs.cfg.run.budget);
  const auto mean_steps = [&](const Results& rs, std::size_t& found) {
    double sum = 0.0;
    found = 0;
    for (const auto& r : rs) {
      found += r.metrics.victim_step ? 1 : 0;
      sum += r.metrics.victim_step ? static_cast<double>(*r.metrics.victim_step) : budget;
    }
    return sum / static_cast<double>(rs.size());
  };
  const auto m = evaluate(vs, harness::PolicyKind::model, &model);
  const auto r = evaluate(vs, harness::PolicyKind::random, nullptr);
  std::size_t m_found = 0, r_found = 0;
  const double m_steps = mean_steps(m, m_found), r_steps = mean_steps(r, r_found);

  // A map counts when most of its repeats find the victim before the whole map is seen.
  const std::size_t repeats = vs.cfg.run.repeats;
  std::size_t good_maps = 0;
  for (std::size_t map = 0; map < kVictimMaps; ++map) {
    std::size_t good = 0;
    for (std::size_t k = 0; k < repeats; ++k) {
      const auto& e = m[map * repeats + k].metrics;
      if (e.victim_step && e.rows[*e.victim_step].total_coverage < 1.0) ++good;
    }
    if (2 * good > repeats) ++good_maps;
  }
  Outcome o;
  o.pass = m_steps < r_steps && good_maps >= kVictimMapsRequired;
  o.detail = fmt("mean steps to victim: model %.1f (%zu/%zu found) vs random %.1f (%zu/%zu found); "
                 "found before full coverage on %zu/%zu maps",
                 m_steps, m_found, m.size(), r_steps, r_found, r.size(), good_maps, kVictimMaps);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string config = ADEX_DESK_CONFIG;
  std::string cli = ADEX_CLI_PATH;
  std::string work = (fs::temp_directory_path() / "adex_acceptance").string();
  std::vector<int> only;
  bool reuse = false;
  app.add_option("--config", config, "Desk-scale experiment config");
  app.add_option("--cli", cli, "Path to the adex executable");
  app.add_option("--work", work, "Scratch directory");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_flag("--reuse", reuse, "Load trained models cached in --work instead of training");
  CLI11_PARSE(app, argc, argv);

  const auto wanted = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };
  fs::create_directories(work);

  std::map<int, Outcome> outcomes;
  auto record = [&](int k, const char* name, const Outcome& o) {
    outcomes[k] = o;
    std::cout << "criterion " << k << " " << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail
              << std::endl;
  };

  if (wanted(1)) record(1, "gradients", gradient_suite());
  if (wanted(2)) record(2, "determinism", determinism(cli, work));
  if (wanted(3)) record(3, "mechanics", mechanics());

  if (wanted(4) || wanted(5) || wanted(6) || wanted(7) || wanted(8)) {
    Suite s;
    s.cfg = harness::load_config(config);
    harness::validate(s.cfg);
    s.maps = harness::evaluation_maps(s.cfg);
    s.work = work;
    s.reuse = reuse;

    std::optional<agents::Model> stage1;
    progress("stage-1 navigation training");
    const auto nav = navigation(s, stage1);
    if (wanted(4)) record(4, "navigation", nav);

    if (wanted(5) || wanted(6) || wanted(7) || wanted(8)) {
      progress("training the full model");
      const auto model = finish_training(s.cfg, std::move(*stage1), fs::path(work) / "full.weights", reuse);
      std::map<std::string, Results> runs;
      progress("evaluating model");
      runs["model"] = evaluate(s, harness::PolicyKind::model, &model);
      progress("evaluating sweeping");
      runs["sweeping"] = evaluate(s, harness::PolicyKind::sweeping, nullptr);
      if (wanted(5)) {
        progress("evaluating random");
        runs["random"] = evaluate(s, harness::PolicyKind::random, nullptr);
        progress("evaluating curiosity");
        runs["curiosity"] = evaluate(s, harness::PolicyKind::curiosity, nullptr);
        record(5, "ordering", ordering(runs, s.cfg.run.budget));
      }
      if (wanted(6)) record(6, "efficiency", efficiency(runs["model"], runs["sweeping"]));
      if (wanted(8)) record(8, "victim search", victim_search(s, model));
      if (wanted(7)) record(7, "ablations", ablations(s, model));
    }
  }

  std::size_t failed = 0;
  for (const auto& [k, o] : outcomes) failed += o.pass ? 0 : 1;
  std::cout << (failed == 0 ? "all criteria passed" : fmt("%zu criteria failed", failed)) << std::endl;
  return failed == 0 ? 0 : 1;
}
