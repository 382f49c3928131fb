#include "peec/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "peec/json_io.hpp"

namespace peec {

namespace {

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Overlays `patch` onto `target`, insisting that every patched path already
// exists with the same JSON shape. Keeps config typos loud.
void merge_into(json& target, const json& patch, const std::string& prefix) {
  if (!patch.is_object())
    throw ConfigError("config: expected an object at '" + (prefix.empty() ? "<root>" : prefix) +
                      "'");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = join_path(prefix, key);
    if (!target.contains(key)) throw ConfigError("config: unknown field '" + path + "'");
    json& slot = target[key];
    if (slot.is_object()) {
      merge_into(slot, value, path);
      continue;
    }
    if (value.is_object() || value.is_array())
      throw ConfigError("config: field '" + path + "' takes a scalar");
    const bool num_ok = slot.is_number() && value.is_number();
    const bool bool_ok = slot.is_boolean() && value.is_boolean();
    const bool str_ok = slot.is_string() && value.is_string();
    if (!num_ok && !bool_ok && !str_ok)
      throw ConfigError("config: field '" + path + "' has the wrong type");
    slot = value;
  }
}

RunConfig from_full_json(const json& j) {
  try {
    return j.get<RunConfig>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void check(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw ConfigError("config: field '" + field + "' " + why);
}

}  // namespace

RunConfig profile_config(const std::string& name) {
  RunConfig cfg;
  if (name == "desk") {
    cfg.profile = "desk";
    cfg.game.horizon = 300;
    return cfg;
  }
  if (name == "paper") {
    cfg.profile = "paper";
    cfg.game.horizon = 1000;
    cfg.game.randomize_shooting_radius = true;
    cfg.game.randomize_speed_ratio = true;
    cfg.learner.train_episodes = 20000;
    cfg.learner.hidden = 256;
    cfg.learner.td3_update_every = 1;
    return cfg;
  }
  throw ConfigError("config: unknown profile '" + name + "'");
}

std::string render_config_json(const RunConfig& cfg) {
  json j = cfg;
  return j.dump(2) + "\n";
}

RunConfig parse_config_json_onto(RunConfig base, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");
  if (doc.contains("profile")) {
    const json& p = doc["profile"];
    if (!p.is_string()) throw ConfigError("config: field 'profile' has the wrong type");
    const std::string name = p.get<std::string>();
    if (name == "desk" || name == "paper") {
      base = profile_config(name);
    } else if (name != "custom" && name != base.profile) {
      throw ConfigError("config: unknown profile '" + name + "'");
    }
  }
  json full = base;
  merge_into(full, doc, "");
  return from_full_json(full);
}

RunConfig parse_config_json(const std::string& text) {
  return parse_config_json_onto(profile_config("desk"), text);
}

void apply_override(RunConfig& cfg, const std::string& dotted_assignment) {
  const auto eq = dotted_assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("config: override '" + dotted_assignment + "' is not of the form path=value");
  const std::string path = dotted_assignment.substr(0, eq);
  const std::string raw = dotted_assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(raw);
    if (value.is_object() || value.is_array()) value = raw;
  } catch (const json::exception&) {
    value = raw;
  }

  json patch = value;
  std::size_t end = path.size();
  for (;;) {
    const auto dot = path.rfind('.', end - 1);
    const std::size_t start = dot == std::string::npos ? 0 : dot + 1;
    const std::string key = path.substr(start, end - start);
    if (key.empty()) throw ConfigError("config: override path '" + path + "' is malformed");
    patch = json{{key, patch}};
    if (dot == std::string::npos) break;
    end = dot;
  }

  json full = cfg;
  merge_into(full, patch, "");
  cfg = from_full_json(full);
}

bool apply_env_seed(RunConfig& cfg) {
  const char* raw = std::getenv("PEEC_SEED");
  if (raw == nullptr) return false;
  char* tail = nullptr;
  const unsigned long long parsed = std::strtoull(raw, &tail, 10);
  if (tail == raw || *tail != '\0')
    throw ConfigError(std::string("config: PEEC_SEED value '") + raw + "' is not an integer");
  cfg.seed = static_cast<std::uint64_t>(parsed);
  return true;
}

void validate_config(const RunConfig& cfg) {
  const GameConfig& g = cfg.game;
  check(g.map_w > 0.0, "game.map_w", "must be positive");
  check(g.map_h > 0.0, "game.map_h", "must be positive");
  check(g.dt > 0.0, "game.dt", "must be positive");
  check(g.horizon >= 1, "game.horizon", "must be at least 1");
  check(g.capture_radius > 0.0, "game.capture_radius", "must be positive");
  check(g.shooting_radius > 0.0, "game.shooting_radius", "must be positive");
  check(g.v_p > 0.0, "game.v_p", "must be positive");
  check(g.v_e >= 0.0, "game.v_e", "must be nonnegative");
  check(g.omega_max > 0.0, "game.omega_max", "must be positive");
  check(!g.randomize_shooting_radius || (g.shooting_radius_lo > 0.0 &&
                                         g.shooting_radius_hi >= g.shooting_radius_lo),
        "game.shooting_radius_lo", "bounds must be positive and ordered");
  check(!g.randomize_speed_ratio || (g.speed_ratio_lo > 0.0 &&
                                     g.speed_ratio_hi >= g.speed_ratio_lo),
        "game.speed_ratio_lo", "bounds must be positive and ordered");

  const LearnerConfig& l = cfg.learner;
  check(l.train_episodes >= 1, "learner.train_episodes", "must be at least 1");
  check(l.hidden >= 1, "learner.hidden", "must be at least 1");
  check(l.batch_size >= 1, "learner.batch_size", "must be at least 1");
  check(l.lr > 0.0, "learner.lr", "must be positive");
  check(l.gamma >= 0.0 && l.gamma <= 1.0, "learner.gamma", "must lie in [0, 1]");
  check(l.tau > 0.0 && l.tau <= 1.0, "learner.tau", "must lie in (0, 1]");
  check(l.policy_noise >= 0.0, "learner.policy_noise", "must be nonnegative");
  check(l.noise_clip >= 0.0, "learner.noise_clip", "must be nonnegative");
  check(l.policy_delay >= 1, "learner.policy_delay", "must be at least 1");
  check(l.exploration_noise >= 0.0, "learner.exploration_noise", "must be nonnegative");
  check(l.td3_update_every >= 1, "learner.td3_update_every", "must be at least 1");
  check(l.warmup_steps >= 0, "learner.warmup_steps", "must be nonnegative");
  check(l.max_env_steps >= 1, "learner.max_env_steps", "must be at least 1");
  check(l.replay_capacity >= l.batch_size, "learner.replay_capacity",
        "must hold at least one batch");
  check(l.window >= 1, "learner.window", "must be at least 1");
  check(l.ppo_clip > 0.0, "learner.ppo_clip", "must be positive");
  check(l.gae_lambda >= 0.0 && l.gae_lambda <= 1.0, "learner.gae_lambda", "must lie in [0, 1]");
  check(l.ppo_epochs >= 1, "learner.ppo_epochs", "must be at least 1");
  check(l.rollout_decisions >= 1, "learner.rollout_decisions", "must be at least 1");
  check(l.entropy_coef >= 0.0, "learner.entropy_coef", "must be nonnegative");
  check(l.opp_batch >= 1, "learner.opp_batch", "must be at least 1");
  check(l.eval_freq >= 1, "learner.eval_freq", "must be at least 1");
  check(l.eval_episodes >= 1, "learner.eval_episodes", "must be at least 1");

  check(cfg.eval_n >= 1, "eval_n", "must be at least 1");
  check(cfg.workers >= 1, "workers", "must be at least 1");
  check(!cfg.out_dir.empty(), "out_dir", "must be nonempty");
  check(!cfg.pursuer_nav.empty(), "pursuer_nav", "must be nonempty");
  check(!cfg.pursuer_query.empty(), "pursuer_query", "must be nonempty");
  check(!cfg.evader_nav.empty(), "evader_nav", "must be nonempty");
}

RunConfig resolve_config(const ConfigCliInputs& in) {
  RunConfig cfg = profile_config(in.profile);
  if (in.config_path) {
    std::ifstream f(*in.config_path);
    if (!f) throw ConfigError("config: cannot open '" + *in.config_path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    cfg = parse_config_json_onto(cfg, buf.str());
  }
  for (const auto& ov : in.overrides) apply_override(cfg, ov);
  if (in.seed) cfg.seed = *in.seed;
  apply_env_seed(cfg);
  validate_config(cfg);
  return cfg;
}

}  // namespace peec
