#pragma once
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "peec/game.hpp"

namespace peec {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LearnerConfig {
  int train_episodes = 2000;
  int hidden = 32;
  int batch_size = 32;
  double lr = 3e-4;
  double gamma = 0.99;
  double tau = 0.005;
  double policy_noise = 0.2;
  double noise_clip = 0.5;
  int policy_delay = 5;
  double exploration_noise = 0.1;
  // One critic update per this many environment steps. The reference cadence
  // is every step; the desk profile stretches it to keep wall time sane.
  int td3_update_every = 24;
  int warmup_steps = 1000;
  // Training stops at the first episode boundary past this many environment
  // steps, episode budget notwithstanding.
  long max_env_steps = 10000000;
  long replay_capacity = 1000000;
  int window = 8;  // recurrent training window length
  double ppo_clip = 0.2;
  double gae_lambda = 0.95;
  int ppo_epochs = 4;
  int rollout_decisions = 2048;
  double entropy_coef = 0.01;
  int opp_batch = 32;
  int eval_freq = 250;
  int eval_episodes = 50;
};

// Full run description. Serialized verbatim into every artifact header so a
// run is reproducible from any of its outputs.
struct RunConfig {
  std::string profile = "desk";
  GameConfig game;
  LearnerConfig learner;
  std::string pursuer_nav = "pure_pursuit";  // pure_pursuit | td3 | checkpoint:<path>
  std::string pursuer_query = "no_comm";     // no_comm | random | periodic:<k> | ppo | checkpoint:<path>
  std::string evader_nav = "evasive";        // evasive | td3 | checkpoint:<path>
  int eval_n = 500;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int workers = 1;
};

// Named baseline profiles. `desk` trims scale (300-step horizon, hidden 32,
// 2000 episodes); `paper` carries the published environment and learner
// values. Throws ConfigError for other names.
RunConfig profile_config(const std::string& name);

// Canonical JSON rendering (sorted keys, 2-space indent, trailing newline).
std::string render_config_json(const RunConfig& cfg);

// Applies a JSON document on top of a base config. Documents may set any
// subset of fields; unknown fields and shape mismatches throw ConfigError
// naming the dotted path. A "profile" key in the document re-bases onto that
// profile first.
RunConfig parse_config_json(const std::string& text);
RunConfig parse_config_json_onto(RunConfig base, const std::string& text);

// `game.horizon=300` style assignment. The value is parsed as JSON when
// possible and treated as a bare string otherwise.
void apply_override(RunConfig& cfg, const std::string& dotted_assignment);

// PEEC_SEED, when set, wins over file and flags. Returns whether it applied.
bool apply_env_seed(RunConfig& cfg);

// Bounds and consistency checks; throws ConfigError naming the field.
void validate_config(const RunConfig& cfg);

struct ConfigCliInputs {
  std::string profile = "desk";
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

// Resolution order: profile defaults, then the config file, then dotted
// overrides, then the --seed flag, then PEEC_SEED. Validates the result.
RunConfig resolve_config(const ConfigCliInputs& in);

}  // namespace peec
