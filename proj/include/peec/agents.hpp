#pragma once
#include <memory>
#include <string>
#include <vector>

#include "peec/buffers.hpp"
#include "peec/checkpoint.hpp"
#include "peec/episode.hpp"
#include "peec/nn.hpp"
#include "peec/observation.hpp"

namespace peec {

// Actor-critic pair of recurrent nets (dense, dense, LSTM, linear head).
// Critics score (features, action); the actor emits one tanh-squashed control.
struct RecurrentNet {
  ParamStore store;
  RecurrentTrunk trunk;
  Dense head;
  int in = 0, hidden = 0, out = 0;
  static RecurrentNet create(int in, int hidden, int out, Rng& rng);
  void copy_values_from(const RecurrentNet& other);
};

struct Td3Settings {
  int obs_dim = kFeatureDim;
  int hidden = 32;
  double lr = 3e-4;
  double gamma = 0.99;
  double tau = 0.005;
  double policy_noise = 0.2;
  double noise_clip = 0.5;
  int policy_delay = 5;
  double exploration_noise = 0.1;
  int batch_size = 32;
};

struct Td3Stats {
  bool updated = false;
  bool actor_updated = false;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
};

// Twin-critic deterministic-policy learner over replay windows. Critic
// recurrence starts from a zero state at the window head (their hidden states
// do not exist at collection time); the actor and its target start from the
// stored behavior state.
class Td3Agent {
 public:
  Td3Agent(Td3Settings s, Rng& init);

  // One control in [-1, 1]; advances the caller's recurrent state. explore
  // adds Gaussian noise (scale exploration_noise) before the final clamp.
  double act(const std::vector<double>& features, RecurrentState& state, Rng& rng,
             bool explore) const;

  // No-op (updated = false) until the buffer holds batch_size windows.
  Td3Stats update(const ReplayBuffer& buffer, Rng& rng);

  // Online critic 1 unrolled from a zero state over an (obs, action) sequence.
  std::vector<double> critic1_values(const std::vector<std::vector<double>>& obs,
                                     const std::vector<double>& actions) const;

  int hidden() const { return s_.hidden; }
  int obs_dim() const { return s_.obs_dim; }
  const Td3Settings& settings() const { return s_; }
  long critic_updates() const { return critic_updates_; }
  void set_critic_updates(long n) { critic_updates_ = n; }

  const RecurrentNet& actor() const { return actor_; }
  const RecurrentNet& critic1() const { return critic1_; }
  const RecurrentNet& critic2() const { return critic2_; }
  const RecurrentNet& target_actor() const { return t_actor_; }
  const RecurrentNet& target_critic1() const { return t_critic1_; }
  const RecurrentNet& target_critic2() const { return t_critic2_; }

  void checkpoint(std::vector<CheckpointBlock>& out, const std::string& prefix) const;
  void restore(const std::vector<CheckpointBlock>& blocks, const std::string& prefix);
  // integer counters (Adam steps, delayed-update phase); kept in the JSON
  // manifest so they survive the float32 blob round trip exactly
  json extra_state() const;
  void set_extra_state(const json& j);

 private:
  Td3Settings s_;
  RecurrentNet actor_, critic1_, critic2_, t_actor_, t_critic1_, t_critic2_;
  Adam opt_actor_, opt_c1_, opt_c2_;
  long critic_updates_ = 0;
};

struct PpoSettings {
  int obs_dim = kFeatureDim;
  int hidden = 32;
  double lr = 3e-4;
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  int epochs = 4;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
};

struct PpoStats {
  bool updated = false;
  int steps = 0;
  // First-epoch quantities, measured before any parameter change, when the
  // probability ratios are exactly 1.
  double surrogate_first = 0.0;
  double value_loss_first = 0.0;
  double entropy_first = 0.0;
};

struct PpoState {
  RecurrentState actor, critic;
  void reset(int hidden) {
    actor.reset(hidden);
    critic.reset(hidden);
  }
};

// Clipped-surrogate learner for the binary query decision, with a separate
// recurrent value net. Actor and critic replay each episode from a zero
// recurrent state, matching how decisions were collected.
class PpoAgent {
 public:
  PpoAgent(PpoSettings s, Rng& init);

  // Samples a decision; reports the chosen action's log-probability and the
  // value estimate used later for advantages.
  int act(const std::vector<double>& features, PpoState& state, Rng& rng, double* logp,
          double* value) const;
  int act_argmax(const std::vector<double>& features, PpoState& state) const;

  PpoStats update(const RolloutBuffer& rollout);

  int hidden() const { return s_.hidden; }
  const PpoSettings& settings() const { return s_; }
  const RecurrentNet& actor() const { return actor_; }

  void checkpoint(std::vector<CheckpointBlock>& out, const std::string& prefix) const;
  void restore(const std::vector<CheckpointBlock>& blocks, const std::string& prefix);
  json extra_state() const;
  void set_extra_state(const json& j);

 private:
  PpoSettings s_;
  RecurrentNet actor_, critic_;
  Adam opt_actor_, opt_critic_;
  void logits(const std::vector<double>& features, RecurrentState& st, double out[2]) const;
};

struct OppSettings {
  int hidden = 32;
  double lr = 3e-4;
  double eps = 1e-6;
  double elapsed_scale = 50.0;  // input normalization only
};

struct OppPair {
  Vec2 anchor;
  double elapsed = 0.0;
  Vec2 truth;
};

// Feedforward displacement predictor: (anchor, elapsed) -> (position delta,
// sigma). Trained on pairs whose ground truth a later query revealed.
class OpponentModel {
 public:
  OpponentModel(OppSettings s, Rng& init);

  Prediction predict(const Vec2& last_observed, double elapsed) const;
  double update(const std::vector<OppPair>& batch);  // returns mean score

  const OppSettings& settings() const { return s_; }
  void checkpoint(std::vector<CheckpointBlock>& out, const std::string& prefix) const;
  void restore(const std::vector<CheckpointBlock>& blocks, const std::string& prefix);
  json extra_state() const;
  void set_extra_state(const json& j);

 private:
  OppSettings s_;
  ParamStore store_;
  Dense d1_, d2_, head_mu_, head_sigma_;
  Adam opt_;
};

// ---- plug-in adapters for the episode runner ----

// Live model when `borrowed` is set (training); otherwise owns a snapshot.
struct ModelPredictor final : Predictor {
  const OpponentModel* borrowed = nullptr;
  std::shared_ptr<const OpponentModel> owned;
  explicit ModelPredictor(const OpponentModel* live) : borrowed(live) {}
  explicit ModelPredictor(std::shared_ptr<const OpponentModel> snapshot)
      : owned(std::move(snapshot)) {}
  Prediction predict(const Vec2& last, double elapsed) override {
    return (borrowed ? borrowed : owned.get())->predict(last, elapsed);
  }
  std::unique_ptr<Predictor> clone() const override {
    return std::make_unique<ModelPredictor>(*this);
  }
};

struct Td3NavPolicy final : NavPolicy {
  std::shared_ptr<const Td3Agent> agent;
  GameConfig cfg;
  bool explore = false;
  RecurrentState state;
  Td3NavPolicy(std::shared_ptr<const Td3Agent> a, const GameConfig& c, bool ex)
      : agent(std::move(a)), cfg(c), explore(ex) {
    state.reset(agent->hidden());
  }
  void reset_episode() override { state.reset(agent->hidden()); }
  double act(const Observation& obs, Rng& rng) override {
    return agent->act(encode_features(obs, cfg), state, rng, explore);
  }
  std::unique_ptr<NavPolicy> clone() const override {
    auto c = std::make_unique<Td3NavPolicy>(agent, cfg, explore);
    return c;
  }
};

struct PpoQueryPolicy final : QueryPolicy {
  std::shared_ptr<const PpoAgent> agent;
  GameConfig cfg;
  bool stochastic = false;
  PpoState state;
  PpoQueryPolicy(std::shared_ptr<const PpoAgent> a, const GameConfig& c, bool sample)
      : agent(std::move(a)), cfg(c), stochastic(sample) {
    state.reset(agent->hidden());
  }
  void reset_episode() override { state.reset(agent->hidden()); }
  int act(const Observation& obs, Rng& rng) override {
    const auto f = encode_features(obs, cfg);
    if (!stochastic) return agent->act_argmax(f, state);
    double lp = 0.0, v = 0.0;
    return agent->act(f, state, rng, &lp, &v);
  }
  std::unique_ptr<QueryPolicy> clone() const override {
    return std::make_unique<PpoQueryPolicy>(agent, cfg, stochastic);
  }
};

}  // namespace peec
