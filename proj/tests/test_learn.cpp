#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "peec/buffers.hpp"
#include "peec/episode.hpp"
#include "peec/train.hpp"
#include "toytasks.hpp"

using namespace peec;

namespace {

EpisodeRecord make_record(int len, int obs_dim, int hidden, double reward, uint64_t seed) {
  Rng rng(seed);
  EpisodeRecord rec;
  for (int t = 0; t < len; ++t) {
    std::vector<double> o(obs_dim), h(hidden), c(hidden);
    for (double& v : o) v = rng.uniform(-1.0, 1.0);
    for (double& v : h) v = rng.uniform(-1.0, 1.0);
    for (double& v : c) v = rng.uniform(-1.0, 1.0);
    rec.obs.push_back(o);
    rec.h.push_back(h);
    rec.c.push_back(c);
    rec.action.push_back(rng.uniform(-1.0, 1.0));
    rec.reward.push_back(reward);
    rec.done.push_back(t + 1 == len ? 1 : 0);
  }
  return rec;
}

std::vector<double> actor_params(const Td3Agent& a) { return flatten(a.actor().store); }

}  // namespace

TEST_CASE("replay windows cover episodes in strides plus a terminal tail") {
  ReplayBuffer buf(1000, 4);
  EpisodeRecord ep = make_record(10, 3, 2, 0.5, 77);
  buf.add(ep);
  // strides at 0 and 4, tail at 6
  REQUIRE(buf.windows() == 3);

  Rng rng(1);
  std::set<double> first_rewards_seen;
  std::vector<int> starts;
  for (int i = 0; i < 200; ++i) {
    const ReplayWindow& w = buf.sample(rng);
    CHECK(w.len == 4);
    CHECK(w.obs_dim == 3);
    CHECK(w.action.size() == 4);
    CHECK(w.obs.size() == 5 * 3);
    // identify the start offset by matching the first action
    int s = -1;
    for (int cand : {0, 4, 6}) {
      if (w.action[0] == ep.action[cand]) s = cand;
    }
    REQUIRE(s >= 0);
    starts.push_back(s);
    for (int t = 0; t < 4; ++t) {
      CHECK(w.action[t] == ep.action[s + t]);
      CHECK(w.reward[t] == ep.reward[s + t]);
      CHECK(w.done[t] == ep.done[s + t]);
      for (int d = 0; d < 3; ++d) CHECK(w.obs[t * 3 + d] == ep.obs[s + t][d]);
    }
    CHECK(w.h0 == ep.h[s]);
    CHECK(w.c0 == ep.c[s]);
    // trailing observation row: next step's obs, or zeros past the terminal
    for (int d = 0; d < 3; ++d) {
      double expect = s + 4 < 10 ? ep.obs[s + 4][d] : 0.0;
      CHECK(w.obs[4 * 3 + d] == expect);
    }
    if (s == 6) CHECK(w.done[3] == 1);
  }
  // uniform sampling reaches every stored window
  std::set<int> distinct(starts.begin(), starts.end());
  CHECK(distinct.size() == 3);
}

TEST_CASE("replay windows never span episodes and exact multiples cut no tail") {
  ReplayBuffer buf(1000, 4);
  buf.add(make_record(8, 2, 2, 1.0, 5));
  CHECK(buf.windows() == 2);  // 0 and 4 only, 8 % 4 == 0
  buf.add(make_record(3, 2, 2, 1.0, 6));
  CHECK(buf.windows() == 2);  // too short to contribute
  buf.add(make_record(4, 2, 2, 1.0, 7));
  CHECK(buf.windows() == 3);
}

TEST_CASE("replay ring overwrites the oldest window at capacity") {
  ReplayBuffer buf(8, 4);  // room for exactly 2 windows
  buf.add(make_record(4, 2, 2, 1.0, 11));
  buf.add(make_record(4, 2, 2, 2.0, 12));
  REQUIRE(buf.windows() == 2);
  buf.add(make_record(4, 2, 2, 3.0, 13));
  REQUIRE(buf.windows() == 2);
  Rng rng(3);
  std::set<double> rewards;
  for (int i = 0; i < 100; ++i) rewards.insert(buf.sample(rng).reward[0]);
  CHECK(rewards == std::set<double>{2.0, 3.0});
}

TEST_CASE("replay sampling is deterministic in the rng state") {
  ReplayBuffer buf(100, 2);
  for (int i = 0; i < 6; ++i) buf.add(make_record(4, 2, 2, i, 100 + i));
  Rng a(42), b(42);
  for (int i = 0; i < 50; ++i) {
    CHECK(buf.sample(a).reward[0] == buf.sample(b).reward[0]);
  }
}

TEST_CASE("replay rejects malformed inputs") {
  CHECK_THROWS_AS(ReplayBuffer(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(ReplayBuffer(3, 4), std::invalid_argument);
  ReplayBuffer buf(100, 2);
  EpisodeRecord bad = make_record(4, 2, 2, 0.0, 1);
  bad.reward.pop_back();
  CHECK_THROWS_AS(buf.add(bad), std::invalid_argument);
  Rng rng(1);
  CHECK_THROWS_AS(buf.sample(rng), std::logic_error);
}

TEST_CASE("gae matches the hand recursion") {
  auto [adv, ret] = gae({1.0, 2.0}, {0.5, 1.5}, 0.9, 0.8);
  // delta_1 = 2 - 1.5 = 0.5; delta_0 = 1 + 0.9*1.5 - 0.5 = 1.85
  // adv_0 = 1.85 + 0.72*0.5 = 2.21
  REQUIRE(adv.size() == 2);
  CHECK(adv[0] == doctest::Approx(2.21).epsilon(1e-12));
  CHECK(adv[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ret[0] == doctest::Approx(2.71).epsilon(1e-12));
  CHECK(ret[1] == doctest::Approx(2.0).epsilon(1e-12));

  auto [adv1, ret1] = gae({3.0}, {1.0}, 0.99, 0.95);
  CHECK(adv1[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ret1[0] == doctest::Approx(3.0).epsilon(1e-12));

  CHECK_THROWS_AS(gae({1.0}, {1.0, 2.0}, 0.9, 0.9), std::invalid_argument);
}

TEST_CASE("rollout buffer counts only closed episodes and polices misuse") {
  RolloutBuffer roll;
  CHECK_THROWS_AS(roll.push(PpoStep{}), std::logic_error);
  roll.begin_episode();
  CHECK_THROWS_AS(roll.begin_episode(), std::logic_error);
  CHECK_THROWS_AS(roll.set_last_reward(1.0), std::logic_error);
  roll.push(PpoStep{{1.0}, 1, -0.1, 0.2, 0.0});
  roll.set_last_reward(3.0);
  CHECK(roll.decisions() == 0);
  roll.end_episode();
  CHECK(roll.decisions() == 1);
  CHECK(roll.episodes().size() == 1);
  CHECK(roll.episodes()[0].steps[0].reward == 3.0);
  roll.begin_episode();
  roll.end_episode();  // empty episodes are dropped
  CHECK(roll.episodes().size() == 1);
  roll.clear();
  CHECK(roll.decisions() == 0);
  CHECK(roll.episodes().empty());
}

TEST_CASE("td3 update is a no-op below one batch of windows") {
  Td3Settings s;
  s.obs_dim = 3;
  s.hidden = 4;
  s.batch_size = 8;
  Rng init(1);
  Td3Agent agent(s, init);
  ReplayBuffer buf(1000, 4);
  buf.add(make_record(8, 3, 4, 1.0, 2));  // 2 windows < 8
  auto before = actor_params(agent);
  Rng rng(5);
  Td3Stats st = agent.update(buf, rng);
  CHECK_FALSE(st.updated);
  CHECK(actor_params(agent) == before);
  CHECK(agent.critic_updates() == 0);
}

TEST_CASE("td3 exploration noise stays inside the control bounds") {
  Td3Settings s;
  s.obs_dim = 2;
  s.hidden = 4;
  s.exploration_noise = 50.0;
  Rng init(3);
  Td3Agent agent(s, init);
  RecurrentState st;
  st.reset(s.hidden);
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    double a = agent.act({0.3, -0.2}, st, rng, true);
    CHECK(a >= -1.0);
    CHECK(a <= 1.0);
  }
}

TEST_CASE("td3 critic converges to the constant reward at gamma zero") {
  Td3Settings s;
  s.obs_dim = 3;
  s.hidden = 8;
  s.gamma = 0.0;
  s.lr = 3e-3;
  s.batch_size = 16;
  s.policy_delay = 1000000;  // isolate the critics
  Rng init(7);
  Td3Agent agent(s, init);
  ReplayBuffer buf(100000, 4);
  for (int e = 0; e < 40; ++e) buf.add(make_record(12, 3, 8, 0.7, 4000 + e));
  Rng rng(13);
  for (int u = 0; u < 1500; ++u) agent.update(buf, rng);

  Rng probe(17);
  std::vector<std::vector<double>> obs;
  std::vector<double> acts;
  for (int t = 0; t < 12; ++t) {
    obs.push_back({probe.uniform(-1.0, 1.0), probe.uniform(-1.0, 1.0), probe.uniform(-1.0, 1.0)});
    acts.push_back(probe.uniform(-1.0, 1.0));
  }
  for (double q : agent.critic1_values(obs, acts)) {
    CHECK(std::abs(q - 0.7) < 1e-2);
  }
}

TEST_CASE("tau one makes the targets equal the online nets exactly") {
  Td3Settings s;
  s.obs_dim = 3;
  s.hidden = 4;
  s.tau = 1.0;
  s.policy_delay = 1;
  s.batch_size = 4;
  Rng init(19);
  Td3Agent agent(s, init);
  ReplayBuffer buf(1000, 4);
  buf.add(make_record(8, 3, 4, 0.2, 23));
  buf.add(make_record(8, 3, 4, -0.1, 29));
  Rng rng(31);
  Td3Stats st = agent.update(buf, rng);
  REQUIRE(st.updated);
  REQUIRE(st.actor_updated);
  CHECK(flatten(agent.target_actor().store) == flatten(agent.actor().store));
  CHECK(flatten(agent.target_critic1().store) == flatten(agent.critic1().store));
  CHECK(flatten(agent.target_critic2().store) == flatten(agent.critic2().store));
}

TEST_CASE("td3 solves point reach") {
  toytask::PointReach task;
  Td3Settings s;
  s.obs_dim = toytask::PointReach::kObsDim;
  s.hidden = 16;
  s.lr = 1e-3;
  s.batch_size = 32;
  s.policy_delay = 2;
  s.exploration_noise = 0.3;
  Rng init(101);
  Td3Agent agent(s, init);
  ReplayBuffer buf(200000, 8);
  toytask::train_point_reach(task, agent, buf, 500, 555, 4, 500);
  double mean_final = toytask::eval_point_reach(task, agent, 50, 556);
  MESSAGE("point reach mean final distance: " << mean_final);
  CHECK(mean_final < 0.1);
}

TEST_CASE("ppo update is a no-op until episodes close and rejects nothing") {
  PpoSettings s;
  s.obs_dim = 2;
  s.hidden = 4;
  Rng init(3);
  PpoAgent agent(s, init);
  RolloutBuffer roll;
  PpoStats st = agent.update(roll);
  CHECK_FALSE(st.updated);
}

TEST_CASE("zero advantages leave the ppo actor parameters bit-identical") {
  PpoSettings s;
  s.obs_dim = 2;
  s.hidden = 4;
  s.entropy_coef = 0.0;
  // with gamma zero each temporal difference is reward minus value, so a
  // rollout whose stored values equal the rewards has advantages identically
  // zero and the policy gradient vanishes exactly
  s.gamma = 0.0;
  Rng init(5);
  PpoAgent agent(s, init);
  auto before = flatten(agent.actor().store);

  RolloutBuffer roll;
  Rng rng(7);
  for (int e = 0; e < 6; ++e) {
    roll.begin_episode();
    for (int t = 0; t < 5; ++t) {
      double v = rng.uniform(-1.0, 1.0);
      roll.push(PpoStep{{rng.u01(), rng.u01()}, static_cast<int>(rng.uniform_int(2)),
                        -std::log(2.0), v, v});
    }
    roll.end_episode();
  }
  PpoStats st = agent.update(roll);
  REQUIRE(st.updated);
  CHECK(flatten(agent.actor().store) == before);
}

TEST_CASE("first ppo epoch sees unit ratios and a centered surrogate") {
  PpoSettings s;
  s.obs_dim = 2;
  s.hidden = 6;
  Rng init(9);
  PpoAgent agent(s, init);
  RolloutBuffer roll;
  Rng rng(11);
  for (int e = 0; e < 20; ++e) {
    roll.begin_episode();
    PpoState st;
    st.reset(agent.hidden());
    double logp = 0.0, value = 0.0;
    int a = agent.act(toytask::bandit_obs(), st, rng, &logp, &value);
    roll.push(PpoStep{toytask::bandit_obs(), a, logp, value, 0.0});
    roll.set_last_reward(a == 1 ? 1.0 : 0.0);
    roll.end_episode();
  }
  PpoStats st = agent.update(roll);
  REQUIRE(st.updated);
  CHECK(st.steps == 20);
  // with ratio == 1 the clipped surrogate is the mean normalized advantage
  CHECK(std::abs(st.surrogate_first) < 1e-9);
  CHECK(st.entropy_first > 0.0);
  CHECK(st.entropy_first <= std::log(2.0) + 1e-9);
  CHECK(st.value_loss_first >= 0.0);
}

TEST_CASE("ppo learns the better bandit arm") {
  PpoSettings s;
  s.obs_dim = 2;
  s.hidden = 8;
  s.lr = 0.01;
  Rng init(13);
  PpoAgent agent(s, init);
  toytask::train_bandit(agent, 200, 16, 999);
  CHECK(toytask::bandit_arm1_prob(agent, 400, 1000) > 0.95);
}

TEST_CASE("opponent model loss equals the prediction feedback score") {
  OppSettings s;
  s.hidden = 8;
  Rng init(15);
  OpponentModel model(s, init);
  Rng rng(17);
  std::vector<OppPair> batch;
  for (int i = 0; i < 16; ++i) {
    OppPair p;
    p.anchor = {rng.u01(), rng.u01()};
    p.elapsed = 1.0 + static_cast<double>(rng.uniform_int(10));
    p.truth = {rng.u01(), rng.u01()};
    batch.push_back(p);
  }
  double expected = 0.0;
  for (const auto& p : batch) {
    Prediction pred = model.predict(p.anchor, p.elapsed);
    expected += prediction_feedback(pred.pos, pred.sigma, p.truth);
  }
  expected /= batch.size();
  double loss = model.update(batch);
  // the training loss regularizes the distance with a 1e-12 floor; on random
  // targets the two scores agree far below test tolerance
  CHECK(loss == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("opponent model tracks a constant-velocity target and grows sigma with elapsed") {
  toytask::SyntheticDrift task;
  OppSettings s;
  s.hidden = 16;
  s.lr = 3e-3;
  Rng init(19);
  OpponentModel model(s, init);
  toytask::train_drift_model(task, model, 2000, 32, 777);

  Rng rng(21);
  double err = 0.0;
  int n = 200;
  for (int i = 0; i < n; ++i) {
    OppPair p = task.sample(rng);
    while (p.elapsed > 10.0) p = task.sample(rng);
    Prediction pred = model.predict(p.anchor, p.elapsed);
    err += std::hypot(pred.pos.x - p.truth.x, pred.pos.y - p.truth.y);
  }
  err /= n;
  CHECK(err < 2.0 * task.v);

  double sigma_short = 0.0, sigma_long = 0.0;
  for (int i = 0; i < 50; ++i) {
    Vec2 anchor{rng.u01(), rng.u01()};
    sigma_short += model.predict(anchor, 1.0).sigma;
    sigma_long += model.predict(anchor, 20.0).sigma;
  }
  CHECK(sigma_long > sigma_short);
}

TEST_CASE("bundle checkpoints round-trip parameters and counters") {
  RunConfig cfg = profile_config("desk");
  cfg.learner.hidden = 6;
  cfg.learner.batch_size = 4;
  cfg.seed = 77;
  ShadowBundle b = make_bundle(cfg);

  // advance some state so the counters are nontrivial
  ReplayBuffer buf(1000, cfg.learner.window);
  for (int e = 0; e < 8; ++e)
    buf.add(make_record(2 * cfg.learner.window, kFeatureDim, cfg.learner.hidden, 0.1,
                        1000 + e));
  Rng rng(23);
  for (int u = 0; u < 7; ++u) b.pursuer_nav->update(buf, rng);
  CHECK(b.pursuer_nav->critic_updates() == 7);

  auto dir = std::filesystem::temp_directory_path() / "peec_bundle_test";
  std::filesystem::create_directories(dir);
  const std::string base = (dir / "ckpt_test").string();
  json extra{{"episode", 42},
             {"env_steps", 1234},
             {"update_rng", rng.state()},
             {"config", json(cfg)}};
  save_bundle(base, b, extra);

  json loaded_extra;
  ShadowBundle r = load_bundle(base, &loaded_extra);
  CHECK(loaded_extra.at("episode").get<int>() == 42);
  CHECK(loaded_extra.at("env_steps").get<long>() == 1234);
  CHECK(loaded_extra.at("update_rng").get<uint64_t>() == rng.state());
  CHECK(r.pursuer_nav->critic_updates() == 7);

  // float32 container: parameters match to float precision
  auto a = flatten(b.pursuer_nav->actor().store);
  auto a2 = flatten(r.pursuer_nav->actor().store);
  REQUIRE(a.size() == a2.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a2[i] == doctest::Approx(a[i]).epsilon(1e-6));
    CHECK(a2[i] == static_cast<double>(static_cast<float>(a[i])));
  }
  std::filesystem::remove_all(dir);
}

namespace {

RunConfig smoke_config(const std::string& out_dir) {
  RunConfig cfg = profile_config("desk");
  cfg.game.horizon = 40;
  cfg.learner.train_episodes = 8;
  cfg.learner.eval_freq = 4;
  cfg.learner.eval_episodes = 3;
  cfg.learner.hidden = 8;
  cfg.learner.batch_size = 4;
  cfg.learner.window = 4;
  cfg.learner.warmup_steps = 60;
  cfg.learner.td3_update_every = 20;
  cfg.learner.rollout_decisions = 64;
  cfg.learner.opp_batch = 8;
  cfg.seed = 31;
  cfg.out_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("train smoke run emits snapshots, logs, and resumable checkpoints") {
  auto dir = std::filesystem::temp_directory_path() / "peec_train_smoke";
  std::filesystem::remove_all(dir);
  RunConfig cfg = smoke_config((dir / "run").string());
  TrainResult res = train(cfg);

  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].episode == 4);
  CHECK(res.rows[1].episode == 8);
  CHECK(res.episodes_run == 8);
  CHECK(res.env_steps > 0);
  CHECK(std::filesystem::exists(dir / "run" / "ckpt_4.bin"));
  CHECK(std::filesystem::exists(dir / "run" / "ckpt_8.json"));

  std::ifstream log(res.log_path);
  REQUIRE(log.good());
  std::string line;
  std::getline(log, line);
  CHECK(line == training_log_header());
  CHECK(line.rfind("episode,P_win,", 0) == 0);
  int rows = 0;
  while (std::getline(log, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 2);

  SUBCASE("two resumes from one checkpoint continue identically") {
    RunConfig c1 = smoke_config((dir / "resume_a").string());
    RunConfig c2 = smoke_config((dir / "resume_b").string());
    TrainResult r1 = train(c1, (dir / "run" / "ckpt_4").string());
    TrainResult r2 = train(c2, (dir / "run" / "ckpt_4").string());
    REQUIRE(r1.rows.size() == 1);
    REQUIRE(r2.rows.size() == 1);
    CHECK(r1.rows[0].episode == 8);
    CHECK(training_log_row(r1.rows[0]) == training_log_row(r2.rows[0]));
    CHECK(r1.env_steps == r2.env_steps);

    json e1, e2;
    load_bundle((dir / "resume_a" / "ckpt_8").string(), &e1);
    load_bundle((dir / "resume_b" / "ckpt_8").string(), &e2);
    CHECK(e1.at("update_rng").get<uint64_t>() == e2.at("update_rng").get<uint64_t>());
    CHECK(e1.at("env_steps").get<long>() == e2.at("env_steps").get<long>());
  }

  SUBCASE("checkpoint policies drive deterministic evaluation") {
    RunConfig ecfg = cfg;
    const std::string base = (dir / "run" / "ckpt_8").string();
    ecfg.pursuer_nav = "checkpoint:" + base;
    ecfg.pursuer_query = "checkpoint:" + base;
    ecfg.evader_nav = "checkpoint:" + base;
    PursuerController p = build_pursuer(ecfg);
    EvaderController e = build_evader(ecfg);
    REQUIRE(p.predictor != nullptr);
    REQUIRE(e.predictor != nullptr);
    auto t1 = evaluate(ecfg.game, p, e, 6, 900, 1);
    auto t2 = evaluate(ecfg.game, p, e, 6, 900, 2);
    REQUIRE(t1.size() == t2.size());
    for (size_t i = 0; i < t1.size(); ++i) {
      CHECK(t1[i].final_status() == t2[i].final_status());
      REQUIRE(t1[i].steps.size() == t2[i].steps.size());
      for (size_t k = 0; k < t1[i].steps.size(); ++k) {
        CHECK(t1[i].steps[k].a_p == t2[i].steps[k].a_p);
        CHECK(t1[i].steps[k].q == t2[i].steps[k].q);
        CHECK(t1[i].steps[k].reward_p == t2[i].steps[k].reward_p);
      }
    }
  }

  std::filesystem::remove_all(dir);
}

TEST_CASE("policy string factory rejects unknown and train-only names") {
  RunConfig cfg = profile_config("desk");
  cfg.pursuer_nav = "flying_carpet";
  CHECK_THROWS_AS(build_pursuer(cfg), ConfigError);
  cfg.pursuer_nav = "td3";
  CHECK_THROWS_AS(build_pursuer(cfg), ConfigError);
  cfg.pursuer_nav = "pure_pursuit";
  cfg.pursuer_query = "ppo";
  CHECK_THROWS_AS(build_pursuer(cfg), ConfigError);
  cfg.pursuer_query = "periodic:0";
  CHECK_THROWS_AS(build_pursuer(cfg), ConfigError);
  cfg.pursuer_query = "periodic:7";
  PursuerController p = build_pursuer(cfg);
  CHECK(p.predictor == nullptr);
  RunConfig e = profile_config("desk");
  e.evader_nav = "hover";
  CHECK_THROWS_AS(build_evader(e), ConfigError);
}
