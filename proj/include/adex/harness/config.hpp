#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "adex/agents/training.hpp"
#include "adex/baselines/baselines.hpp"
#include "adex/env/scenario.hpp"

namespace adex::harness {

enum class PolicyKind { model, sweeping, random, curiosity };

std::string to_string(PolicyKind p);
PolicyKind parse_policy(const std::string& text);

enum class StartRule { corner, center, random };

std::string to_string(StartRule s);
StartRule parse_start(const std::string& text);

struct RunConfig {
  PolicyKind policy = PolicyKind::model;
  std::size_t repeats = 1;
  std::size_t budget = 8000;
  bool stop_at_victim = true;
  StartRule start = StartRule::corner;
  /// Evaluation draws exploration actions from the actor instead of its
  /// argmax; the argmax of a stochastic policy tends to lock into cycles.
  bool sample_actor = true;
  std::filesystem::path weights;
  bool render = false;
  int render_scale = 4;
};

/// Everything an experiment needs; every field has a config key.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  env::ScenarioSpec scenario;
  std::size_t map_count = 1;
  /// AOIMAP files; when non-empty they replace the generated maps.
  std::vector<std::filesystem::path> map_files;
  agents::EnvironmentConfig env;
  agents::DdqnConfig ddqn;
  agents::A2cConfig a2c;
  agents::TrainingSchedule schedule;
  std::size_t training_maps = 20;
  baselines::CuriosityConfig curiosity;
  RunConfig run;
};

/// Applies one `key = value` assignment. Throws ConfigError for unknown keys
/// and malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Line-oriented `key = value` text; `#` starts a comment. Later lines
/// override earlier ones.
void parse_config(std::istream& in, ExperimentConfig& cfg, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Cross-field checks (scenario, environment, learner settings).
void validate(const ExperimentConfig& cfg);

/// All recognised keys, sorted.
std::vector<std::string> config_keys();

}  // namespace adex::harness
