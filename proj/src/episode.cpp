#include "peec/episode.hpp"

#include <stdexcept>
#include <thread>

namespace peec {

PursuerController PursuerController::clone() const {
  PursuerController c;
  c.nav = nav ? nav->clone() : nullptr;
  c.query = query ? query->clone() : nullptr;
  c.predictor = predictor ? predictor->clone() : nullptr;
  return c;
}

EvaderController EvaderController::clone() const {
  EvaderController c;
  c.nav = nav ? nav->clone() : nullptr;
  c.predictor = predictor ? predictor->clone() : nullptr;
  return c;
}

EpisodeStreams EpisodeStreams::from_seed(uint64_t seed) {
  return {Rng::derive(seed, "reset"), Rng::derive(seed, "elimination"),
          Rng::derive(seed, "policy_p"), Rng::derive(seed, "policy_e")};
}

static std::optional<Prediction> side_prediction(Predictor* pred, const GameState& st,
                                                 Side side) {
  if (!pred || st.t == st.t0) return std::nullopt;
  const Vec2& last = side == Side::Pursuer ? st.last_observed_evader : st.last_observed_pursuer;
  return pred->predict(last, static_cast<double>(st.t - st.t0));
}

EpisodeTrace run_episode(const GameConfig& cfg, PursuerController& pursuer,
                         EvaderController& evader, uint64_t seed, const StepHook& hook) {
  if (!pursuer.nav || !pursuer.query || !evader.nav) {
    throw std::invalid_argument("run_episode: controllers incomplete");
  }
  EpisodeStreams rs = EpisodeStreams::from_seed(seed);
  GameState state = reset(cfg, rs.reset);

  pursuer.nav->reset_episode();
  pursuer.query->reset_episode();
  evader.nav->reset_episode();

  EpisodeTrace trace;
  trace.config = cfg;
  trace.params = state.params;
  trace.seed = seed;

  while (state.status == Status::Running) {
    Observation obs_p = build_observation(cfg, state, Side::Pursuer,
                                          side_prediction(pursuer.predictor.get(), state,
                                                          Side::Pursuer));
    Observation obs_e = build_observation(cfg, state, Side::Evader,
                                          side_prediction(evader.predictor.get(), state,
                                                          Side::Evader));
    StepAction action;
    action.a_p = pursuer.nav->act(obs_p, rs.policy_p);
    action.q_p = pursuer.query->act(obs_p, rs.policy_p);
    action.a_e = evader.nav->act(obs_e, rs.policy_e);

    StepResult result = step(cfg, state, action, rs.elimination);
    trace.steps.push_back(make_step_record(state, action, result));
    if (hook) hook(StepContext{obs_p, obs_e, action, result, state});
  }
  return trace;
}

std::vector<EpisodeTrace> evaluate(const GameConfig& cfg, const PursuerController& pursuer,
                                   const EvaderController& evader, int episodes,
                                   uint64_t seed_base, int workers) {
  if (episodes < 0) throw std::invalid_argument("evaluate: episodes must be >= 0");
  workers = std::max(1, workers);
  std::vector<EpisodeTrace> traces(episodes);
  if (workers == 1) {
    PursuerController p = pursuer.clone();
    EvaderController e = evader.clone();
    for (int i = 0; i < episodes; ++i) {
      traces[i] = run_episode(cfg, p, e, seed_base + static_cast<uint64_t>(i));
      traces[i].episode_index = i;
    }
    return traces;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      PursuerController p = pursuer.clone();
      EvaderController e = evader.clone();
      for (int i = w; i < episodes; i += workers) {
        traces[i] = run_episode(cfg, p, e, seed_base + static_cast<uint64_t>(i));
        traces[i].episode_index = i;
      }
    });
  }
  for (auto& t : pool) t.join();
  return traces;
}

}  // namespace peec
