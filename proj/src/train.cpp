#include "peec/train.hpp"

#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "peec/episode.hpp"

namespace peec {

Td3Settings td3_settings(const LearnerConfig& l) {
  Td3Settings s;
  s.obs_dim = kFeatureDim;
  s.hidden = l.hidden;
  s.lr = l.lr;
  s.gamma = l.gamma;
  s.tau = l.tau;
  s.policy_noise = l.policy_noise;
  s.noise_clip = l.noise_clip;
  s.policy_delay = l.policy_delay;
  s.exploration_noise = l.exploration_noise;
  s.batch_size = l.batch_size;
  return s;
}

PpoSettings ppo_settings(const LearnerConfig& l) {
  PpoSettings s;
  s.obs_dim = kFeatureDim;
  s.hidden = l.hidden;
  s.lr = l.lr;
  s.gamma = l.gamma;
  s.lambda = l.gae_lambda;
  s.clip = l.ppo_clip;
  s.epochs = l.ppo_epochs;
  s.entropy_coef = l.entropy_coef;
  return s;
}

OppSettings opp_settings(const LearnerConfig& l) {
  OppSettings s;
  s.hidden = l.hidden;
  s.lr = l.lr;
  return s;
}

ShadowBundle make_bundle(const RunConfig& cfg) {
  ShadowBundle b;
  Rng r_pn = Rng::derive(cfg.seed, "init_p_nav");
  Rng r_pq = Rng::derive(cfg.seed, "init_p_query");
  Rng r_po = Rng::derive(cfg.seed, "init_p_opp");
  Rng r_en = Rng::derive(cfg.seed, "init_e_nav");
  Rng r_eo = Rng::derive(cfg.seed, "init_e_opp");
  b.pursuer_nav = std::make_shared<Td3Agent>(td3_settings(cfg.learner), r_pn);
  b.pursuer_query = std::make_shared<PpoAgent>(ppo_settings(cfg.learner), r_pq);
  b.pursuer_opp = std::make_shared<OpponentModel>(opp_settings(cfg.learner), r_po);
  b.evader_nav = std::make_shared<Td3Agent>(td3_settings(cfg.learner), r_en);
  b.evader_opp = std::make_shared<OpponentModel>(opp_settings(cfg.learner), r_eo);
  return b;
}

void save_bundle(const std::string& base, const ShadowBundle& b, json extra) {
  std::vector<CheckpointBlock> blocks;
  b.pursuer_nav->checkpoint(blocks, "p_nav.");
  b.pursuer_query->checkpoint(blocks, "p_query.");
  b.pursuer_opp->checkpoint(blocks, "p_opp.");
  b.evader_nav->checkpoint(blocks, "e_nav.");
  b.evader_opp->checkpoint(blocks, "e_opp.");
  extra["agents"] = json{{"p_nav", b.pursuer_nav->extra_state()},
                         {"p_query", b.pursuer_query->extra_state()},
                         {"p_opp", b.pursuer_opp->extra_state()},
                         {"e_nav", b.evader_nav->extra_state()},
                         {"e_opp", b.evader_opp->extra_state()}};
  save_checkpoint(base, blocks, extra);
}

ShadowBundle load_bundle(const std::string& base, json* extra_out) {
  auto [blocks, extra] = load_checkpoint(base);
  RunConfig cfg;
  try {
    cfg = extra.at("config").get<RunConfig>();
  } catch (const json::exception& e) {
    throw std::runtime_error("checkpoint " + base + " has no usable embedded config: " + e.what());
  }
  ShadowBundle b = make_bundle(cfg);
  b.pursuer_nav->restore(blocks, "p_nav.");
  b.pursuer_query->restore(blocks, "p_query.");
  b.pursuer_opp->restore(blocks, "p_opp.");
  b.evader_nav->restore(blocks, "e_nav.");
  b.evader_opp->restore(blocks, "e_opp.");
  const json& ag = extra.at("agents");
  b.pursuer_nav->set_extra_state(ag.at("p_nav"));
  b.pursuer_query->set_extra_state(ag.at("p_query"));
  b.pursuer_opp->set_extra_state(ag.at("p_opp"));
  b.evader_nav->set_extra_state(ag.at("e_nav"));
  b.evader_opp->set_extra_state(ag.at("e_opp"));
  if (extra_out) *extra_out = std::move(extra);
  return b;
}

std::string training_log_header() {
  std::string h = report_csv_header();
  return "episode" + h.substr(h.find(',')) + ",R_P,R_E";
}

std::string training_log_row(const ValidationRow& row) {
  char buf[64];
  std::string out = report_csv_row(std::to_string(row.episode), row.report);
  std::snprintf(buf, sizeof buf, ",%.6g,%.6g", row.mean_payoff_p, row.mean_payoff_e);
  return out + buf;
}

namespace {

// Collection-side adapters. They write every acted step into the training
// buffers and are deliberately not cloneable: collection is single-stream.

struct TrainTd3Nav final : NavPolicy {
  Td3Agent* agent;
  const GameConfig* game;
  EpisodeRecord* rec;
  RecurrentState state;
  TrainTd3Nav(Td3Agent* a, const GameConfig* g, EpisodeRecord* r) : agent(a), game(g), rec(r) {
    state.reset(agent->hidden());
  }
  void reset_episode() override { state.reset(agent->hidden()); }
  double act(const Observation& obs, Rng& rng) override {
    std::vector<double> f = encode_features(obs, *game);
    rec->h.push_back(state.h);
    rec->c.push_back(state.c);
    double a = agent->act(f, state, rng, true);
    rec->obs.push_back(std::move(f));
    rec->action.push_back(a);
    return a;
  }
  std::unique_ptr<NavPolicy> clone() const override {
    throw std::logic_error("training collector is not cloneable");
  }
};

struct TrainPpoQuery final : QueryPolicy {
  PpoAgent* agent;
  const GameConfig* game;
  RolloutBuffer* roll;
  PpoState state;
  TrainPpoQuery(PpoAgent* a, const GameConfig* g, RolloutBuffer* r) : agent(a), game(g), roll(r) {
    state.reset(agent->hidden());
  }
  void reset_episode() override { state.reset(agent->hidden()); }
  int act(const Observation& obs, Rng& rng) override {
    std::vector<double> f = encode_features(obs, *game);
    double logp = 0.0, value = 0.0;
    int a = agent->act(f, state, rng, &logp, &value);
    roll->push(PpoStep{std::move(f), a, logp, value, 0.0});
    return a;
  }
  std::unique_ptr<QueryPolicy> clone() const override {
    throw std::logic_error("training collector is not cloneable");
  }
};

void drain_opp_queue(std::deque<OppPair>& q, OpponentModel& model, int batch) {
  while (q.size() >= static_cast<size_t>(batch)) {
    std::vector<OppPair> chunk(q.begin(), q.begin() + batch);
    q.erase(q.begin(), q.begin() + batch);
    model.update(chunk);
  }
}

ValidationRow run_validation(const RunConfig& cfg, const ShadowBundle& b, int episode) {
  PursuerController p;
  p.nav = std::make_unique<Td3NavPolicy>(b.pursuer_nav, cfg.game, false);
  p.query = std::make_unique<PpoQueryPolicy>(b.pursuer_query, cfg.game, false);
  p.predictor = std::make_unique<ModelPredictor>(b.pursuer_opp.get());
  EvaderController e;
  e.nav = std::make_unique<Td3NavPolicy>(b.evader_nav, cfg.game, false);
  e.predictor = std::make_unique<ModelPredictor>(b.evader_opp.get());

  auto traces = evaluate(cfg.game, p, e, cfg.learner.eval_episodes, cfg.seed, cfg.workers);
  std::vector<EpisodeSummary> sums;
  sums.reserve(traces.size());
  ValidationRow row;
  row.episode = episode;
  for (const auto& t : traces) {
    sums.push_back(summarize(t));
    row.mean_payoff_p += sums.back().payoff_p;
    row.mean_payoff_e += sums.back().payoff_e;
  }
  row.mean_payoff_p /= static_cast<double>(sums.size());
  row.mean_payoff_e /= static_cast<double>(sums.size());
  row.report = aggregate(sums);
  return row;
}

}  // namespace

TrainResult train(const RunConfig& cfg, const std::string& resume_base) {
  validate_config(cfg);
  std::filesystem::create_directories(cfg.out_dir);

  ShadowBundle b;
  int start_ep = 0;
  long env_steps = 0;
  Rng update_rng = Rng::derive(cfg.seed, "train_update");
  if (resume_base.empty()) {
    b = make_bundle(cfg);
  } else {
    json extra;
    b = load_bundle(resume_base, &extra);
    start_ep = extra.at("episode").get<int>();
    env_steps = extra.at("env_steps").get<long>();
    update_rng.set_state(extra.at("update_rng").get<uint64_t>());
  }

  ReplayBuffer replay_p(cfg.learner.replay_capacity, cfg.learner.window);
  ReplayBuffer replay_e(cfg.learner.replay_capacity, cfg.learner.window);
  RolloutBuffer roll;
  std::deque<OppPair> oppq_p, oppq_e;

  const std::string log_path = cfg.out_dir + "/training_log.csv";
  std::ofstream log(log_path, start_ep == 0 ? std::ios::trunc : std::ios::app);
  if (!log) throw std::runtime_error("train: cannot open " + log_path);
  if (start_ep == 0) log << training_log_header() << "\n" << std::flush;

  EpisodeRecord rec_p, rec_e;
  PursuerController pur;
  pur.nav = std::make_unique<TrainTd3Nav>(b.pursuer_nav.get(), &cfg.game, &rec_p);
  pur.query = std::make_unique<TrainPpoQuery>(b.pursuer_query.get(), &cfg.game, &roll);
  pur.predictor = std::make_unique<ModelPredictor>(b.pursuer_opp.get());
  EvaderController ev;
  ev.nav = std::make_unique<TrainTd3Nav>(b.evader_nav.get(), &cfg.game, &rec_e);
  ev.predictor = std::make_unique<ModelPredictor>(b.evader_opp.get());

  TrainResult result;
  result.log_path = log_path;

  auto hook = [&](const StepContext& c) {
    bool terminal = c.result.status != Status::Running;
    rec_p.reward.push_back(c.result.reward_p);
    rec_p.done.push_back(terminal ? 1 : 0);
    rec_e.reward.push_back(c.result.reward_e);
    rec_e.done.push_back(terminal ? 1 : 0);
    roll.set_last_reward(c.result.reward_p);
    if (c.action.q_p == 1 && c.result.status != Status::Eliminated) {
      oppq_p.push_back(OppPair{c.obs_p.last_opponent_pos, c.obs_p.elapsed + 1.0,
                               c.state_after.last_observed_evader});
      oppq_e.push_back(OppPair{c.obs_e.last_opponent_pos, c.obs_e.elapsed + 1.0,
                               c.state_after.last_observed_pursuer});
    }
    ++env_steps;
    if (env_steps > cfg.learner.warmup_steps && env_steps % cfg.learner.td3_update_every == 0) {
      b.pursuer_nav->update(replay_p, update_rng);
      b.evader_nav->update(replay_e, update_rng);
    }
  };

  int ep = start_ep;
  for (; ep < cfg.learner.train_episodes; ++ep) {
    if (env_steps >= cfg.learner.max_env_steps) break;
    const uint64_t seed = cfg.seed + (1ull << 32) + static_cast<uint64_t>(ep);
    roll.begin_episode();
    run_episode(cfg.game, pur, ev, seed, hook);
    roll.end_episode();
    replay_p.add(rec_p);
    replay_e.add(rec_e);
    rec_p = EpisodeRecord{};
    rec_e = EpisodeRecord{};
    drain_opp_queue(oppq_p, *b.pursuer_opp, cfg.learner.opp_batch);
    drain_opp_queue(oppq_e, *b.evader_opp, cfg.learner.opp_batch);
    if (roll.decisions() >= cfg.learner.rollout_decisions) {
      b.pursuer_query->update(roll);
      roll.clear();
    }

    if ((ep + 1) % cfg.learner.eval_freq == 0) {
      ValidationRow row = run_validation(cfg, b, ep + 1);
      log << training_log_row(row) << "\n" << std::flush;
      result.rows.push_back(row);
      json extra{{"episode", ep + 1},
                 {"env_steps", env_steps},
                 {"update_rng", update_rng.state()},
                 {"config", json(cfg)}};
      const std::string base = cfg.out_dir + "/ckpt_" + std::to_string(ep + 1);
      save_bundle(base, b, extra);
      result.last_checkpoint = base;
    }
  }

  result.episodes_run = ep;
  result.env_steps = env_steps;
  if (ep % cfg.learner.eval_freq != 0) {
    // off-cadence stop (episode budget or step cap): still leave a resumable
    // checkpoint at the final episode
    json extra{{"episode", ep},
               {"env_steps", env_steps},
               {"update_rng", update_rng.state()},
               {"config", json(cfg)}};
    const std::string base = cfg.out_dir + "/ckpt_" + std::to_string(ep);
    save_bundle(base, b, extra);
    result.last_checkpoint = base;
  }
  return result;
}

namespace {

bool has_prefix(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

std::string checkpoint_base(const std::string& spec) {
  return spec.substr(std::string("checkpoint:").size());
}

int parse_periodic_k(const std::string& spec) {
  const std::string arg = spec.substr(std::string("periodic:").size());
  try {
    size_t used = 0;
    int k = std::stoi(arg, &used);
    if (used != arg.size() || k < 1) throw std::invalid_argument("");
    return k;
  } catch (const std::exception&) {
    throw ConfigError("config: periodic query policy needs a positive integer, got '" + arg +
                      "'");
  }
}

}  // namespace

PursuerController build_pursuer(const RunConfig& cfg) {
  PursuerController out;
  std::shared_ptr<const OpponentModel> opp;

  const std::string& nav = cfg.pursuer_nav;
  if (nav == "pure_pursuit") {
    out.nav = std::make_unique<PurePursuitNav>();
  } else if (has_prefix(nav, "checkpoint:")) {
    ShadowBundle b = load_bundle(checkpoint_base(nav));
    out.nav = std::make_unique<Td3NavPolicy>(b.pursuer_nav, cfg.game, false);
    opp = b.pursuer_opp;
  } else if (nav == "td3") {
    throw ConfigError("config: pursuer_nav 'td3' is only trainable; evaluate a checkpoint:<base>");
  } else {
    throw ConfigError("config: unknown pursuer_nav '" + nav + "'");
  }

  const std::string& q = cfg.pursuer_query;
  if (q == "no_comm") {
    out.query = std::make_unique<NoCommPolicy>();
  } else if (q == "random") {
    out.query = std::make_unique<RandomCommPolicy>();
  } else if (has_prefix(q, "periodic:")) {
    out.query = std::make_unique<PeriodicCommPolicy>(parse_periodic_k(q));
  } else if (has_prefix(q, "checkpoint:")) {
    ShadowBundle b = load_bundle(checkpoint_base(q));
    out.query = std::make_unique<PpoQueryPolicy>(b.pursuer_query, cfg.game, false);
    if (!opp) opp = b.pursuer_opp;
  } else if (q == "ppo") {
    throw ConfigError(
        "config: pursuer_query 'ppo' is only trainable; evaluate a checkpoint:<base>");
  } else {
    throw ConfigError("config: unknown pursuer_query '" + q + "'");
  }

  if (opp) out.predictor = std::make_unique<ModelPredictor>(std::move(opp));
  return out;
}

EvaderController build_evader(const RunConfig& cfg) {
  EvaderController out;
  const std::string& nav = cfg.evader_nav;
  if (nav == "evasive") {
    out.nav = std::make_unique<EvasiveNav>(cfg.game.map_w, cfg.game.map_h);
  } else if (has_prefix(nav, "checkpoint:")) {
    ShadowBundle b = load_bundle(checkpoint_base(nav));
    out.nav = std::make_unique<Td3NavPolicy>(b.evader_nav, cfg.game, false);
    out.predictor = std::make_unique<ModelPredictor>(
        std::shared_ptr<const OpponentModel>(b.evader_opp));
  } else if (nav == "td3") {
    throw ConfigError("config: evader_nav 'td3' is only trainable; evaluate a checkpoint:<base>");
  } else {
    throw ConfigError("config: unknown evader_nav '" + nav + "'");
  }
  return out;
}

}  // namespace peec
