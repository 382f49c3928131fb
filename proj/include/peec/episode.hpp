#pragma once
#include <functional>
#include <memory>
#include <vector>

#include "peec/policy.hpp"
#include "peec/trace.hpp"

namespace peec {

// Opponent-position estimator plugged into the mediator view.
struct Predictor {
  virtual ~Predictor() = default;
  virtual Prediction predict(const Vec2& last_observed_pos, double elapsed_steps) = 0;
  virtual std::unique_ptr<Predictor> clone() const = 0;
};

struct PursuerController {
  std::unique_ptr<NavPolicy> nav;
  std::unique_ptr<QueryPolicy> query;
  std::unique_ptr<Predictor> predictor;  // optional; fallback estimator otherwise

  PursuerController clone() const;
};

struct EvaderController {
  std::unique_ptr<NavPolicy> nav;
  std::unique_ptr<Predictor> predictor;  // optional

  EvaderController clone() const;
};

struct StepContext {
  const Observation& obs_p;
  const Observation& obs_e;
  const StepAction& action;
  const StepResult& result;
  const GameState& state_after;
};
using StepHook = std::function<void(const StepContext&)>;

// Per-purpose streams all fan out from one episode seed.
struct EpisodeStreams {
  Rng reset;
  Rng elimination;
  Rng policy_p;
  Rng policy_e;
  static EpisodeStreams from_seed(uint64_t seed);
};

EpisodeTrace run_episode(const GameConfig& cfg, PursuerController& pursuer,
                         EvaderController& evader, uint64_t seed,
                         const StepHook& hook = nullptr);

// Episode i always runs from seed seed_base + i; traces come back in episode
// order, so worker count never changes the output.
std::vector<EpisodeTrace> evaluate(const GameConfig& cfg, const PursuerController& pursuer,
                                   const EvaderController& evader, int episodes,
                                   uint64_t seed_base, int workers = 1);

}  // namespace peec
