#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adex/harness/config.hpp"
#include "adex/metrics.hpp"

namespace adex::harness {

/// Seed streams. Evaluation maps, training maps and episodes never share one.
inline constexpr std::uint64_t kEvalMapStream = 0x6d617073;
inline constexpr std::uint64_t kTrainMapStream = 0x74726e6d;
inline constexpr std::uint64_t kEpisodeStream = 0x65707364;
inline constexpr std::uint64_t kModelStream = 0x6d6f646c;

/// Evaluation maps: the configured files, or maps.count generated maps.
std::vector<env::GroundTruthMap> evaluation_maps(const ExperimentConfig& cfg);
std::vector<env::GroundTruthMap> training_maps(const ExperimentConfig& cfg);

env::AgentPose start_pose(StartRule rule, const env::GroundTruthMap& map, Rng& rng);

struct EpisodeResult {
  std::size_t episode = 0;
  std::size_t map = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  metrics::EpisodeMetrics metrics;
};

/// One episode with the configured policy. model is required for policy=model.
metrics::EpisodeMetrics run_episode(const ExperimentConfig& cfg, const env::GroundTruthMap& map,
                                    const agents::Model* model, std::uint64_t seed);

/// Every (map, repeat) pair, episode index = map * repeats + repeat. Runs in
/// parallel when OpenMP is available; results do not depend on the thread
/// count.
std::vector<EpisodeResult> run_episodes(const ExperimentConfig& cfg, const std::vector<env::GroundTruthMap>& maps,
                                        const agents::Model* model);

/// Loads the model named by run.weights. ConfigError if it is missing.
agents::Model load_model_for(const ExperimentConfig& cfg);

/// Fresh model with the configured ablation, trained through all stages.
agents::Model train_model(const ExperimentConfig& cfg, const agents::TrainingLog& log = {});

// ---------------------------------------------------------------------------
// Outputs

/// Value as printed with 9 significant digits, read back.
double round9(double v);
std::string format9(double v);

void write_episode_csv(std::ostream& out, const EpisodeResult& r);

/// Per-episode quantities, derived from the rounded CSV values.
struct EpisodeStats {
  std::size_t steps = 0;
  std::vector<long> threshold_steps;
  double final_aoi = 0.0;
  double final_total = 0.0;
  double total_reward = 0.0;
  long victim_step = -1;
};

EpisodeStats episode_stats(const EpisodeResult& r);

struct Aggregate {
  double mean = -1.0;
  double std = -1.0;
  std::size_t count = 0;
};

/// Mean and population standard deviation over the values; count 0 gives
/// the -1 sentinels.
Aggregate aggregate(const std::vector<double>& values);

void write_episode_table(std::ostream& out, const std::vector<EpisodeResult>& results);
void write_summary(std::ostream& out, const std::string& label, const std::vector<EpisodeResult>& results);

/// Runs the evaluation and writes episode_NNN.csv, episodes.csv,
/// summary.csv (and renders when run.render is set) into out_dir.
std::vector<EpisodeResult> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Trains (or loads from weights_dir/<variant>.weights) the full model and
/// each single-flag ablation, evaluates each, and writes one directory per
/// variant plus ablation.csv.
void run_ablation(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                  const std::optional<std::filesystem::path>& weights_dir, const agents::TrainingLog& log = {});

struct AblationVariant {
  std::string name;
  policy::Ablation flags;
};
std::vector<AblationVariant> ablation_variants();

}  // namespace adex::harness
