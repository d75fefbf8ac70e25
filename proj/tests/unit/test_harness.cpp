#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "adex/error.hpp"
#include "adex/harness/config.hpp"
#include "adex/harness/experiment.hpp"
#include "adex/harness/render.hpp"

using namespace adex;
using namespace adex::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("adex_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_files(const fs::path& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ext ? 1 : 0;
  return n;
}

// Small and fast: baselines on tiny generated maps.
ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.scenario.width = 24;
  cfg.scenario.height = 24;
  cfg.scenario.blob_sigma = 3.0;
  cfg.env.region_side = 8;
  cfg.map_count = 2;
  cfg.run.repeats = 3;
  cfg.run.budget = 60;
  cfg.run.policy = PolicyKind::random;
  return cfg;
}

EpisodeResult with_series(std::initializer_list<double> aoi) {
  EpisodeResult r;
  std::size_t k = 0;
  for (double a : aoi) r.metrics.rows.push_back({k++, 0, 0, a, a / 2, 1.0});
  return r;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ADEX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesAssignmentsCommentsAndOverrides) {
  std::istringstream in(
      "# experiment\n"
      "seed = 42\n"
      "scenario.width = 60   # trailing comment\n"
      "\n"
      "run.policy = sweeping\n"
      "run.budget = 100\n"
      "run.budget = 200\n"
      "ablation.no_lstm = true\n");
  ExperimentConfig cfg;
  parse_config(in, cfg);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.scenario.width, 60);
  EXPECT_EQ(cfg.run.policy, PolicyKind::sweeping);
  EXPECT_EQ(cfg.run.budget, 200u);
  EXPECT_TRUE(cfg.env.ablation.no_lstm);
}

TEST(Config, BlobCountAutoClearsTheExactCount) {
  ExperimentConfig cfg;
  apply_setting(cfg, "scenario.blob_count", "7");
  ASSERT_TRUE(cfg.scenario.blob_count.has_value());
  EXPECT_EQ(*cfg.scenario.blob_count, 7);
  apply_setting(cfg, "scenario.blob_count", "auto");
  EXPECT_FALSE(cfg.scenario.blob_count.has_value());
}

TEST(Config, ErrorsNameTheSourceAndLine) {
  std::istringstream in("seed = 1\nno.such.key = 3\n");
  ExperimentConfig cfg;
  try {
    parse_config(in, cfg, "exp.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("exp.cfg:2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("no.such.key"), std::string::npos) << e.what();
  }
}

TEST(Config, RejectsMalformedValues) {
  ExperimentConfig cfg;
  EXPECT_THROW(apply_setting(cfg, "bogus", "1"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "run.budget", "ten"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "run.budget", "-5"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "scenario.density", "0.5x"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "run.render", "maybe"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "run.policy", "oracle"), ConfigError);
  std::istringstream missing_eq("seed 4\n");
  EXPECT_THROW(parse_config(missing_eq, cfg), ConfigError);
  std::istringstream empty_value("seed =\n");
  EXPECT_THROW(parse_config(empty_value, cfg), ConfigError);
}

TEST(Config, KeyListIsSortedAndCoversEveryGroup) {
  const auto keys = config_keys();
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  for (const char* k : {"seed", "scenario.kind", "maps.files", "env.region_side", "visits.encoding", "weights.aoi",
                        "reward.r_aoi", "stagnation.window", "ablation.no_map", "ddqn.gamma", "a2c.entropy_coef",
                        "train.finetune_budget", "curiosity.intrinsic_scale", "run.render_scale"}) {
    EXPECT_TRUE(std::binary_search(keys.begin(), keys.end(), std::string(k))) << k;
  }
}

TEST(Config, DefaultsValidateAndBadCombinationsDoNot) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  auto bad = cfg;
  bad.run.repeats = 0;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = cfg;
  bad.ddqn.batch_size = bad.ddqn.buffer_capacity + 1;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = cfg;
  bad.ddqn.epsilon.floor = 0.99;
  EXPECT_THROW(validate(bad), ConfigError);
}

TEST(Metrics, ThresholdStepsExample) {
  const std::vector<double> series = {0.0, 0.4, 0.8};
  const auto steps = metrics::threshold_steps(series, metrics::kCoverageThresholds);
  EXPECT_EQ(steps, (std::vector<long>{1, 2, 2}));
}

TEST(Metrics, ThresholdNeverReachedIsMinusOne) {
  const std::vector<double> series = {0.1, 0.35, 0.49};
  EXPECT_EQ(metrics::threshold_steps(series, metrics::kCoverageThresholds), (std::vector<long>{1, -1, -1}));
  EXPECT_EQ(metrics::threshold_steps({}, metrics::kCoverageThresholds), (std::vector<long>{-1, -1, -1}));
}

TEST(Metrics, AggregateIsPopulationMeanAndStd) {
  const auto a = aggregate({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0});
  EXPECT_EQ(a.count, 8u);
  EXPECT_DOUBLE_EQ(a.mean, 5.0);
  EXPECT_DOUBLE_EQ(a.std, 2.0);
  const auto none = aggregate({});
  EXPECT_EQ(none.count, 0u);
  EXPECT_EQ(none.mean, -1.0);
  EXPECT_EQ(none.std, -1.0);
}

TEST(Output, Format9HasNoSignedZero) {
  EXPECT_EQ(format9(-0.0), "0");
  EXPECT_EQ(format9(0.1), "0.1");
  EXPECT_EQ(format9(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(round9(1.0 / 3.0), 0.333333333);
}

TEST(Output, EpisodeCsvLayout) {
  auto r = with_series({0.0, 0.25});
  r.episode = 3;
  std::ostringstream out;
  write_episode_csv(out, r);
  EXPECT_EQ(out.str(),
            "episode,step,x,y,aoi_cov,total_cov,reward\n"
            "3,0,0,0,0,0,1\n"
            "3,1,0,0,0.25,0.125,1\n");
}

TEST(Output, SummaryExcludesUnreachedThresholds) {
  std::vector<EpisodeResult> results = {with_series({0.0, 0.4, 0.8}), with_series({0.0, 0.1, 0.2, 0.31})};
  const auto s0 = episode_stats(results[0]);
  EXPECT_EQ(s0.steps, 2u);
  EXPECT_EQ(s0.final_aoi, 0.8);
  EXPECT_EQ(s0.total_reward, 3.0);
  EXPECT_EQ(s0.victim_step, -1);

  std::ostringstream out;
  write_summary(out, "x", results);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  // steps_to_30 averages 1 and 3; steps_to_50 and steps_to_70 only have the first episode.
  EXPECT_EQ(row.rfind("x,2,2,1,2,2,0,1,2,0,1,", 0), 0u) << row;
  EXPECT_NE(header.find("steps_to_victim_count"), std::string::npos);
}

TEST(Experiment, ZeroBudgetGivesStartRowsAndOneSummaryRow) {
  auto cfg = small_config();
  cfg.map_count = 1;
  cfg.run.repeats = 1;
  cfg.run.budget = 0;
  const auto dir = scratch("zero");
  const auto results = run_experiment(cfg, dir);
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].metrics.rows.size(), 1u);
  std::ifstream summary(dir / "summary.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(summary, line)) ++lines;
  EXPECT_EQ(lines, 2u);
}

TEST(Experiment, WritesOneCsvPerEpisodeAndIsByteReproducible) {
  auto cfg = small_config();
  cfg.run.render = true;
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  const auto results = run_experiment(cfg, a);
  run_experiment(cfg, b);
  ASSERT_EQ(results.size(), 6u);
  for (std::size_t i = 0; i < results.size(); ++i) {
    EXPECT_EQ(results[i].episode, i);
    EXPECT_EQ(results[i].map, i / 3);
    EXPECT_EQ(results[i].repeat, i % 3);
  }
  EXPECT_EQ(count_files(a, ".csv"), 6u + 2u);
  EXPECT_EQ(count_files(a, ".ppm"), 6u);
  for (const auto& e : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path();
  }
}

TEST(Experiment, EverySeedStreamIsDistinct) {
  auto cfg = small_config();
  const auto maps = evaluation_maps(cfg);
  const auto results = run_episodes(cfg, maps, nullptr);
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t j = i + 1; j < results.size(); ++j) EXPECT_NE(results[i].seed, results[j].seed);
  }
  const auto train = training_maps(cfg);
  for (const auto& m : maps) {
    for (const auto& t : train) EXPECT_FALSE(m == t);
  }
}

TEST(Experiment, SweepingBaselineRunsTheFullBudget) {
  auto cfg = small_config();
  cfg.run.policy = PolicyKind::sweeping;
  cfg.run.stop_at_victim = false;
  const auto results = run_episodes(cfg, evaluation_maps(cfg), nullptr);
  for (const auto& r : results) EXPECT_EQ(r.metrics.steps(), cfg.run.budget);
}

TEST(Experiment, MissingWeightsIsAConfigError) {
  auto cfg = small_config();
  cfg.run.policy = PolicyKind::model;
  EXPECT_THROW(run_experiment(cfg, scratch("noweights")), ConfigError);
  cfg.run.weights = "/nonexistent/model.weights";
  EXPECT_THROW(run_experiment(cfg, scratch("noweights")), ConfigError);
}

TEST(Render, ImageSizeAndColors) {
  std::vector<double> aoi(30, 0.0);
  aoi[1] = 1.0;
  env::GroundTruthMap map(6, 5, aoi, env::Cell{5, 4});
  metrics::EpisodeMetrics m;
  m.rows = {{0, 0, 0, 0, 0, 0}, {1, 0, 1, 0, 0, 0}, {2, 0, 0, 0, 0, 0}};
  const auto img = render_image(map, m, 5);
  EXPECT_EQ(img.width, 30);
  EXPECT_EQ(img.height, 25);
  EXPECT_EQ(img.at(7, 2), background_color(1.0));
  EXPECT_EQ(img.at(8, 8), background_color(0.0));
  EXPECT_EQ(img.at(29, 24), kVictimColor);
  EXPECT_EQ(img.at(2, 7), path_color(1));
  EXPECT_EQ(img.at(2, 2), path_color(2));
  EXPECT_THROW(render_image(map, m, 0), ConfigError);
}

TEST(Render, RepeatedVisitsAreStrictlyDarker) {
  for (std::size_t n = 1; n < 200; ++n) {
    const auto a = path_color(n), b = path_color(n + 1);
    const int sa = a.r + a.g + a.b, sb = b.r + b.g + b.b;
    EXPECT_LE(b.r, a.r);
    EXPECT_LE(b.g, a.g);
    EXPECT_LE(b.b, a.b);
    if (n <= 10) {
      EXPECT_LT(sb, sa) << n;
    }
  }
  EXPECT_GT(background_color(1.0).r, background_color(0.0).r);
  EXPECT_LT(background_color(1.0).g, background_color(0.0).g);
}

TEST(Render, PpmHeaderAndSize) {
  env::GroundTruthMap map(6, 5, std::vector<double>(30, 0.5));
  metrics::EpisodeMetrics m;
  m.rows = {{0, 1, 1, 0, 0, 0}};
  const auto path = scratch("ppm") / "x.ppm";
  render_trajectory(map, m, path, 2);
  const auto bytes = slurp(path);
  const std::string header = "P6\n12 10\n255\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  EXPECT_EQ(bytes.size(), header.size() + 12u * 10u * 3u);
}

TEST(Render, EpisodeCsvRoundTrip) {
  EpisodeResult r = with_series({0.0, 0.125, 0.5});
  r.metrics.rows[1].x = 1;
  r.metrics.rows[2].y = 2;
  const auto path = scratch("csv") / "e.csv";
  {
    std::ofstream out(path);
    write_episode_csv(out, r);
  }
  const auto back = read_episode_csv(path);
  ASSERT_EQ(back.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.rows[i].step, r.metrics.rows[i].step);
    EXPECT_EQ(back.rows[i].x, r.metrics.rows[i].x);
    EXPECT_EQ(back.rows[i].y, r.metrics.rows[i].y);
    EXPECT_EQ(back.rows[i].aoi_coverage, r.metrics.rows[i].aoi_coverage);
  }
  std::ofstream(path) << "a,b\n";
  EXPECT_THROW(read_episode_csv(path), ConfigError);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  EXPECT_EQ(run_cli("no-such-command"), 2);
  EXPECT_EQ(run_cli("run --out " + (dir / "r").string() + " --set maps.count=1"), 2);
  EXPECT_EQ(run_cli("run --out " + (dir / "r").string() + " --set no.key=1"), 2);
  EXPECT_EQ(run_cli("generate --out " + (dir / "g1").string() +
                    " --count 2 --set scenario.width=30 scenario.height=30 --seed 9"),
            0);
  EXPECT_EQ(run_cli("generate --out " + (dir / "g2").string() +
                    " --count 2 --set scenario.width=30 scenario.height=30 --seed 9"),
            0);
  for (const char* name : {"map_000.aoimap", "map_001.aoimap"}) {
    EXPECT_EQ(slurp(dir / "g1" / name), slurp(dir / "g2" / name)) << name;
  }
  EXPECT_EQ(run_cli("run --out " + (dir / "s").string() +
                    " --policy sweeping --set maps.files=" + (dir / "g1" / "map_000.aoimap").string() +
                    " run.budget=20 --render"),
            0);
  EXPECT_TRUE(fs::exists(dir / "s" / "episode_000.ppm"));
  EXPECT_EQ(run_cli("render --map " + (dir / "g1" / "map_000.aoimap").string() + " --csv " +
                    (dir / "s" / "episode_000.csv").string() + " --out " + (dir / "again.ppm").string()),
            0);
}
