#include "adex/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "adex/error.hpp"

namespace adex::harness {

std::string to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::model: return "model";
    case PolicyKind::sweeping: return "sweeping";
    case PolicyKind::random: return "random";
    case PolicyKind::curiosity: return "curiosity";
  }
  return "?";
}

PolicyKind parse_policy(const std::string& text) {
  for (auto p : {PolicyKind::model, PolicyKind::sweeping, PolicyKind::random, PolicyKind::curiosity}) {
    if (text == to_string(p)) return p;
  }
  throw ConfigError("unknown policy '" + text + "' (model, sweeping, random, curiosity)");
}

std::string to_string(StartRule s) {
  switch (s) {
    case StartRule::corner: return "corner";
    case StartRule::center: return "center";
    case StartRule::random: return "random";
  }
  return "?";
}

StartRule parse_start(const std::string& text) {
  for (auto s : {StartRule::corner, StartRule::center, StartRule::random}) {
    if (text == to_string(s)) return s;
  }
  throw ConfigError("unknown start rule '" + text + "' (corner, center, random)");
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const auto n = to_int(key, v);
  if (n < 0) throw ConfigError(key + ": must not be negative");
  return static_cast<std::size_t>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

template <class Get>
Setter real(Get get) {
  return [get](ExperimentConfig& c, const std::string& k, const std::string& v) { get(c) = to_double(k, v); };
}
template <class Get>
Setter count(Get get) {
  return [get](ExperimentConfig& c, const std::string& k, const std::string& v) { get(c) = to_count(k, v); };
}
template <class Get>
Setter integer(Get get) {
  return [get](ExperimentConfig& c, const std::string& k, const std::string& v) {
    get(c) = static_cast<int>(to_int(k, v));
  };
}
template <class Get>
Setter flag(Get get) {
  return [get](ExperimentConfig& c, const std::string& k, const std::string& v) { get(c) = to_bool(k, v); };
}

#define ADEX_FIELD(expr) [](ExperimentConfig& c) -> auto& { return c.expr; }

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.seed = static_cast<std::uint64_t>(to_int(k, v));
       }},

      {"scenario.width", integer(ADEX_FIELD(scenario.width))},
      {"scenario.height", integer(ADEX_FIELD(scenario.height))},
      {"scenario.blob_count", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "auto") {
           c.scenario.blob_count.reset();
         } else {
           c.scenario.blob_count = static_cast<int>(to_int(k, v));
         }
       }},
      {"scenario.density", real(ADEX_FIELD(scenario.density))},
      {"scenario.blob_sigma", real(ADEX_FIELD(scenario.blob_sigma))},
      {"scenario.aspect", real(ADEX_FIELD(scenario.aspect))},
      {"scenario.noise_rate", real(ADEX_FIELD(scenario.noise_rate))},
      {"scenario.kind", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.scenario.kind = env::parse_scenario_kind(v);
       }},
      {"scenario.victim_sigma", real(ADEX_FIELD(scenario.victim_sigma))},

      {"maps.count", count(ADEX_FIELD(map_count))},
      {"maps.files", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.map_files.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           item = trim(item);
           if (!item.empty()) c.map_files.emplace_back(item);
         }
       }},

      {"env.observation_side", integer(ADEX_FIELD(env.observation_side))},
      {"env.ego_side", integer(ADEX_FIELD(env.ego_side))},
      {"env.region_side", integer(ADEX_FIELD(env.region_side))},
      {"env.belief_update", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "overwrite") {
           c.env.belief_update = mapping::BeliefUpdate::overwrite;
         } else if (v == "moving_average") {
           c.env.belief_update = mapping::BeliefUpdate::moving_average;
         } else {
           throw ConfigError(k + ": expected overwrite or moving_average");
         }
       }},
      {"env.nav_step_limit", count(ADEX_FIELD(env.nav_step_limit))},
      {"env.expl_step_limit", count(ADEX_FIELD(env.expl_step_limit))},

      {"visits.encoding", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "scaled") {
           c.env.visits.encoding = mapping::VisitEncoding::scaled;
         } else if (v == "binary") {
           c.env.visits.encoding = mapping::VisitEncoding::binary;
         } else {
           throw ConfigError(k + ": expected scaled or binary");
         }
       }},
      {"visits.saturation", integer(ADEX_FIELD(env.visits.saturation))},

      {"weights.coverage", real(ADEX_FIELD(env.weights.coverage))},
      {"weights.aoi", real(ADEX_FIELD(env.weights.aoi))},
      {"weights.distance", real(ADEX_FIELD(env.weights.distance))},

      {"reward.r_aoi", real(ADEX_FIELD(env.reward.aoi))},
      {"reward.r_visited", real(ADEX_FIELD(env.reward.visited))},
      {"reward.r_reach_local", real(ADEX_FIELD(env.reward.reach_local))},
      {"reward.r_reach_target", real(ADEX_FIELD(env.reward.reach_target))},
      {"reward.aoi_threshold", real(ADEX_FIELD(env.reward.aoi_threshold))},
      {"reward.step_cost", real(ADEX_FIELD(env.reward.step_cost))},
      {"reward.shaping", real(ADEX_FIELD(env.reward.shaping))},
      {"reward.shaping_discount", real(ADEX_FIELD(env.reward.shaping_discount))},

      {"stagnation.window", count(ADEX_FIELD(env.stagnation.window))},
      {"stagnation.min_growth", real(ADEX_FIELD(env.stagnation.min_growth))},
      {"stagnation.mass_floor", real(ADEX_FIELD(env.stagnation.mass_floor))},

      {"ablation.no_visits", flag(ADEX_FIELD(env.ablation.no_visits))},
      {"ablation.no_map", flag(ADEX_FIELD(env.ablation.no_map))},
      {"ablation.no_lstm", flag(ADEX_FIELD(env.ablation.no_lstm))},

      {"ddqn.gamma", real(ADEX_FIELD(ddqn.gamma))},
      {"ddqn.learning_rate", real(ADEX_FIELD(ddqn.learning_rate))},
      {"ddqn.batch_size", count(ADEX_FIELD(ddqn.batch_size))},
      {"ddqn.buffer_capacity", count(ADEX_FIELD(ddqn.buffer_capacity))},
      {"ddqn.sync_period", count(ADEX_FIELD(ddqn.sync_period))},
      {"ddqn.clip_norm", real(ADEX_FIELD(ddqn.clip_norm))},
      {"ddqn.huber_delta", real(ADEX_FIELD(ddqn.huber_delta))},
      {"ddqn.train_every", count(ADEX_FIELD(ddqn.train_every))},
      {"ddqn.warmup", count(ADEX_FIELD(ddqn.warmup))},
      {"ddqn.epsilon_start", real(ADEX_FIELD(ddqn.epsilon.start))},
      {"ddqn.epsilon_decay", real(ADEX_FIELD(ddqn.epsilon.decay))},
      {"ddqn.epsilon_floor", real(ADEX_FIELD(ddqn.epsilon.floor))},

      {"a2c.gamma", real(ADEX_FIELD(a2c.gamma))},
      {"a2c.actor_learning_rate", real(ADEX_FIELD(a2c.actor_learning_rate))},
      {"a2c.critic_learning_rate", real(ADEX_FIELD(a2c.critic_learning_rate))},
      {"a2c.rollout_length", count(ADEX_FIELD(a2c.rollout_length))},
      {"a2c.entropy_coef", real(ADEX_FIELD(a2c.entropy_coef))},
      {"a2c.clip_norm", real(ADEX_FIELD(a2c.clip_norm))},
      {"a2c.log_prob_floor", real(ADEX_FIELD(a2c.log_prob_floor))},

      {"train.maps", count(ADEX_FIELD(training_maps))},
      {"train.stage1_episodes", count(ADEX_FIELD(schedule.stage1_episodes))},
      {"train.stage1_step_limit", count(ADEX_FIELD(schedule.stage1_step_limit))},
      {"train.stage1_reach_only", flag(ADEX_FIELD(schedule.stage1_reach_only))},
      {"train.stage2_episodes", count(ADEX_FIELD(schedule.stage2_episodes))},
      {"train.exploration_episodes", count(ADEX_FIELD(schedule.exploration_episodes))},
      {"train.finetune_episodes", count(ADEX_FIELD(schedule.finetune_episodes))},
      {"train.finetune_budget", count(ADEX_FIELD(schedule.finetune_budget))},

      {"curiosity.forward_hidden", count(ADEX_FIELD(curiosity.forward_hidden))},
      {"curiosity.forward_learning_rate", real(ADEX_FIELD(curiosity.forward_learning_rate))},
      {"curiosity.intrinsic_scale", real(ADEX_FIELD(curiosity.intrinsic_scale))},
      {"curiosity.actor_learning_rate", real(ADEX_FIELD(curiosity.a2c.actor_learning_rate))},
      {"curiosity.critic_learning_rate", real(ADEX_FIELD(curiosity.a2c.critic_learning_rate))},
      {"curiosity.entropy_coef", real(ADEX_FIELD(curiosity.a2c.entropy_coef))},

      {"run.policy", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.run.policy = parse_policy(v);
       }},
      {"run.repeats", count(ADEX_FIELD(run.repeats))},
      {"run.budget", count(ADEX_FIELD(run.budget))},
      {"run.stop_at_victim", flag(ADEX_FIELD(run.stop_at_victim))},
      {"run.start", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.run.start = parse_start(v);
       }},
      {"run.sample_actor", flag(ADEX_FIELD(run.sample_actor))},
      {"run.weights", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.run.weights = v; }},
      {"run.render", flag(ADEX_FIELD(run.render))},
      {"run.render_scale", integer(ADEX_FIELD(run.render_scale))},
  };
  return table;
}

#undef ADEX_FIELD

}  // namespace

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(cfg, key, value);
}

void parse_config(std::istream& in, ExperimentConfig& cfg, const std::string& source) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(source + ":" + std::to_string(number) + ": empty key or value");
    }
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  ExperimentConfig cfg;
  parse_config(in, cfg, path.string());
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  env::validate(cfg.scenario);
  agents::validate(cfg.env);
  if (cfg.map_count == 0 && cfg.map_files.empty()) throw ConfigError("maps.count must be positive");
  if (cfg.run.repeats == 0) throw ConfigError("run.repeats must be positive");
  if (cfg.run.render_scale <= 0) throw ConfigError("run.render_scale must be positive");
  if (cfg.training_maps == 0) throw ConfigError("train.maps must be positive");
  if (!(cfg.ddqn.gamma > 0.0 && cfg.ddqn.gamma < 1.0)) throw ConfigError("ddqn.gamma must be in (0,1)");
  if (!(cfg.a2c.gamma > 0.0 && cfg.a2c.gamma < 1.0)) throw ConfigError("a2c.gamma must be in (0,1)");
  if (cfg.ddqn.batch_size == 0 || cfg.ddqn.batch_size > cfg.ddqn.buffer_capacity) {
    throw ConfigError("ddqn.batch_size must be in [1, ddqn.buffer_capacity]");
  }
  if (cfg.a2c.rollout_length == 0) throw ConfigError("a2c.rollout_length must be positive");
  if (cfg.curiosity.forward_hidden == 0) throw ConfigError("curiosity.forward_hidden must be positive");
  const auto& eps = cfg.ddqn.epsilon;
  if (!(eps.floor >= 0.0 && eps.floor <= eps.start && eps.start <= 1.0 && eps.decay > 0.0 && eps.decay <= 1.0)) {
    throw ConfigError("ddqn epsilon schedule must satisfy 0 <= floor <= start <= 1, 0 < decay <= 1");
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

}  // namespace adex::harness
