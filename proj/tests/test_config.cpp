#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "peec/config.hpp"

using namespace peec;

namespace {

struct EnvSeedGuard {
  EnvSeedGuard() { unsetenv("PEEC_SEED"); }
  ~EnvSeedGuard() { unsetenv("PEEC_SEED"); }
};

}  // namespace

TEST_CASE("desk profile trims scale but keeps shared learner values") {
  RunConfig cfg = profile_config("desk");
  CHECK(cfg.profile == "desk");
  CHECK(cfg.game.horizon == 300);
  CHECK(cfg.learner.train_episodes == 2000);
  CHECK(cfg.learner.hidden == 32);
  CHECK(cfg.learner.eval_freq == 250);
  CHECK(cfg.learner.eval_episodes == 50);
  CHECK(cfg.learner.batch_size == 32);
  CHECK(cfg.learner.lr == 3e-4);
  CHECK(cfg.learner.gamma == 0.99);
}

TEST_CASE("paper profile carries the published environment and learner values") {
  RunConfig cfg = profile_config("paper");
  CHECK(cfg.profile == "paper");
  CHECK(cfg.game.horizon == 1000);
  CHECK(cfg.game.map_w == 1.0);
  CHECK(cfg.game.map_h == 1.0);
  CHECK(cfg.game.capture_radius == 0.025);
  CHECK(cfg.game.randomize_shooting_radius);
  CHECK(cfg.game.shooting_radius_lo == 1.0);
  CHECK(cfg.game.shooting_radius_hi == 4.0);
  CHECK(cfg.game.randomize_speed_ratio);
  CHECK(cfg.game.speed_ratio_lo == 0.1);
  CHECK(cfg.game.speed_ratio_hi == 4.0);
  CHECK(cfg.game.catch_bonus == 1000.0);
  CHECK(cfg.game.shot_penalty == 100.0);
  CHECK(cfg.game.pursuer_cost.time == 0.5);
  CHECK(cfg.game.pursuer_cost.query == 0.0);
  CHECK(cfg.game.pursuer_cost.boundary == 10.0);
  CHECK(cfg.game.pursuer_cost.accel == 0.5);
  CHECK(cfg.game.evader_cost.time == -0.5);

  CHECK(cfg.learner.train_episodes == 20000);
  CHECK(cfg.learner.hidden == 256);
  CHECK(cfg.learner.batch_size == 32);
  CHECK(cfg.learner.replay_capacity == 1000000);
  CHECK(cfg.learner.lr == 3e-4);
  CHECK(cfg.learner.gamma == 0.99);
  CHECK(cfg.learner.tau == 0.005);
  CHECK(cfg.learner.policy_noise == 0.2);
  CHECK(cfg.learner.noise_clip == 0.5);
  CHECK(cfg.learner.policy_delay == 5);
  CHECK(cfg.learner.exploration_noise == 0.1);
  CHECK(cfg.learner.td3_update_every == 1);
  CHECK(cfg.learner.ppo_clip == 0.2);
  CHECK(cfg.learner.gae_lambda == 0.95);
  CHECK(cfg.learner.eval_freq == 250);
  CHECK(cfg.learner.eval_episodes == 50);
}

TEST_CASE("unknown profile is rejected") {
  CHECK_THROWS_AS(profile_config("napkin"), ConfigError);
}

TEST_CASE("config JSON round-trips byte for byte") {
  RunConfig cfg = profile_config("paper");
  cfg.seed = 987654321;
  cfg.pursuer_query = "periodic:40";
  const std::string text = render_config_json(cfg);
  RunConfig back = parse_config_json(text);
  CHECK(render_config_json(back) == text);
  CHECK(back.seed == 987654321);
  CHECK(back.pursuer_query == "periodic:40");
}

TEST_CASE("partial documents override only what they mention") {
  RunConfig cfg = parse_config_json(R"({"game": {"horizon": 123}, "seed": 5})");
  CHECK(cfg.game.horizon == 123);
  CHECK(cfg.seed == 5);
  CHECK(cfg.profile == "desk");
  CHECK(cfg.learner.hidden == 32);
}

TEST_CASE("document profile key re-bases the defaults") {
  RunConfig cfg = parse_config_json(R"({"profile": "paper", "learner": {"hidden": 64}})");
  CHECK(cfg.game.horizon == 1000);
  CHECK(cfg.learner.hidden == 64);
  CHECK(cfg.learner.train_episodes == 20000);
}

TEST_CASE("config document errors name the offending field") {
  SUBCASE("unknown field") {
    try {
      parse_config_json(R"({"game": {"bogus": 1}})");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("game.bogus") != std::string::npos);
    }
  }
  SUBCASE("scalar where an object lives") {
    CHECK_THROWS_AS(parse_config_json(R"({"game": 3})"), ConfigError);
  }
  SUBCASE("object where a scalar lives") {
    CHECK_THROWS_AS(parse_config_json(R"({"seed": {"x": 1}})"), ConfigError);
  }
  SUBCASE("wrong scalar type") {
    try {
      parse_config_json(R"({"game": {"horizon": "fast"}})");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("game.horizon") != std::string::npos);
    }
  }
  SUBCASE("invalid JSON") {
    CHECK_THROWS_AS(parse_config_json("{"), ConfigError);
  }
  SUBCASE("non-object document") {
    CHECK_THROWS_AS(parse_config_json("[1,2]"), ConfigError);
  }
  SUBCASE("unknown document profile") {
    CHECK_THROWS_AS(parse_config_json(R"({"profile": "galaxy"})"), ConfigError);
  }
}

TEST_CASE("dotted overrides parse values as JSON with string fallback") {
  RunConfig cfg = profile_config("desk");
  apply_override(cfg, "game.horizon=42");
  CHECK(cfg.game.horizon == 42);
  apply_override(cfg, "learner.lr=0.001");
  CHECK(cfg.learner.lr == 0.001);
  apply_override(cfg, "game.randomize_speed_ratio=true");
  CHECK(cfg.game.randomize_speed_ratio);
  apply_override(cfg, "pursuer_query=periodic:7");
  CHECK(cfg.pursuer_query == "periodic:7");
  apply_override(cfg, "out_dir=runs/exp1");
  CHECK(cfg.out_dir == "runs/exp1");
  apply_override(cfg, "game.pursuer_cost.query=2.5");
  CHECK(cfg.game.pursuer_cost.query == 2.5);

  CHECK_THROWS_AS(apply_override(cfg, "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "=5"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "game..horizon=5"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "game.unknown=5"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "game.horizon=fast"), ConfigError);
}

TEST_CASE("environment seed wins and rejects garbage") {
  EnvSeedGuard guard;
  RunConfig cfg = profile_config("desk");
  cfg.seed = 1;

  CHECK_FALSE(apply_env_seed(cfg));
  CHECK(cfg.seed == 1);

  setenv("PEEC_SEED", "123456789012345", 1);
  CHECK(apply_env_seed(cfg));
  CHECK(cfg.seed == 123456789012345ULL);

  setenv("PEEC_SEED", "12x", 1);
  CHECK_THROWS_AS(apply_env_seed(cfg), ConfigError);
}

TEST_CASE("validation names the bad field") {
  RunConfig cfg = profile_config("desk");
  SUBCASE("good config passes") { validate_config(cfg); }
  SUBCASE("bad horizon") {
    cfg.game.horizon = 0;
    try {
      validate_config(cfg);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("game.horizon") != std::string::npos);
    }
  }
  SUBCASE("bad workers") {
    cfg.workers = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  SUBCASE("bad tau") {
    cfg.learner.tau = 0.0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  SUBCASE("buffer smaller than a batch") {
    cfg.learner.replay_capacity = 8;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  SUBCASE("empty policy name") {
    cfg.pursuer_query = "";
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
}

TEST_CASE("full resolution order: profile, file, overrides, flag, env") {
  EnvSeedGuard guard;
  const std::string path = "test_config_resolution.json";
  {
    std::ofstream f(path);
    f << R"({"game": {"horizon": 200}, "seed": 10, "eval_n": 25})";
  }

  ConfigCliInputs in;
  in.profile = "desk";
  in.config_path = path;
  in.overrides = {"game.horizon=150"};

  RunConfig cfg = resolve_config(in);
  CHECK(cfg.game.horizon == 150);
  CHECK(cfg.eval_n == 25);
  CHECK(cfg.seed == 10);

  in.seed = 77;
  cfg = resolve_config(in);
  CHECK(cfg.seed == 77);

  setenv("PEEC_SEED", "99", 1);
  cfg = resolve_config(in);
  CHECK(cfg.seed == 99);
  unsetenv("PEEC_SEED");

  in.config_path = "does_not_exist.json";
  CHECK_THROWS_AS(resolve_config(in), ConfigError);

  std::remove(path.c_str());
}
