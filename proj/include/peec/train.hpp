#pragma once
#include <memory>
#include <string>
#include <vector>

#include "peec/agents.hpp"
#include "peec/config.hpp"
#include "peec/metrics.hpp"

namespace peec {

// The full learner stack: TD3 navigation and PPO query for the pursuer, TD3
// navigation for the evader, one opponent model per side.
struct ShadowBundle {
  std::shared_ptr<Td3Agent> pursuer_nav;
  std::shared_ptr<PpoAgent> pursuer_query;
  std::shared_ptr<OpponentModel> pursuer_opp;
  std::shared_ptr<Td3Agent> evader_nav;
  std::shared_ptr<OpponentModel> evader_opp;
};

Td3Settings td3_settings(const LearnerConfig& l);
PpoSettings ppo_settings(const LearnerConfig& l);
OppSettings opp_settings(const LearnerConfig& l);

// Fresh bundle with per-piece init streams derived from cfg.seed.
ShadowBundle make_bundle(const RunConfig& cfg);

// base.bin + base.json; the manifest carries the resolved config, every
// integer counter, and the caller's extras, so a run can be rebuilt from the
// checkpoint alone.
void save_bundle(const std::string& base, const ShadowBundle& bundle, json extra);
ShadowBundle load_bundle(const std::string& base, json* extra_out = nullptr);

struct ValidationRow {
  int episode = 0;
  AggregateReport report;
  double mean_payoff_p = 0.0;
  double mean_payoff_e = 0.0;
};

struct TrainResult {
  std::vector<ValidationRow> rows;
  std::string log_path;
  std::string last_checkpoint;
  int episodes_run = 0;
  long env_steps = 0;
};

std::string training_log_header();
std::string training_log_row(const ValidationRow& row);

// Alternating self-play co-training. Collection episode e always runs from
// seed cfg.seed + 2^32 + e; validation reuses the held-out range cfg.seed + i.
// resume_base, when nonempty, restores a bundle checkpoint and continues from
// its episode counter with the recorded update-RNG cursor; replay and rollout
// buffers restart empty.
TrainResult train(const RunConfig& cfg, const std::string& resume_base = "");

// Deterministic evaluation controllers from the config's policy strings
// (pure_pursuit | checkpoint:<base> navs; no_comm | random | periodic:<k> |
// checkpoint:<base> query; evasive | checkpoint:<base> evader). A checkpoint
// component brings its side's opponent model along as the predictor; pure
// heuristics fall back to the built-in estimator. Unknown names throw
// ConfigError.
PursuerController build_pursuer(const RunConfig& cfg);
EvaderController build_evader(const RunConfig& cfg);

}  // namespace peec
