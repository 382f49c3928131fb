#pragma once
// Small closed-form training tasks shared by the unit tests and the
// acceptance harness. Each exercises one learner end to end with a reward
// whose optimum is known.
#include <cmath>
#include <vector>

#include "peec/agents.hpp"
#include "peec/buffers.hpp"

namespace peec::toytask {

// Heading-control point reach: the agent moves at constant speed and steers
// with one bounded control; the observation is the target offset rotated into
// the agent frame plus the current distance; reward is -distance per step.
struct PointReach {
  int steps = 30;
  double speed = 0.05;
  // rad per unit control per step; the tightest orbit has radius speed/turn_rate,
  // which bounds how close a unit that cannot stop can park next to the target
  double turn_rate = 1.2;
  static constexpr int kObsDim = 3;

  struct State {
    double x = 0.0, y = 0.0, heading = 0.0;
    double tx = 0.0, ty = 0.0;
  };

  State start(Rng& rng) const {
    State s;
    double r = rng.uniform(0.3, 0.7);
    double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    s.x = r * std::cos(phi);
    s.y = r * std::sin(phi);
    s.heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return s;
  }

  std::vector<double> observe(const State& s) const {
    double dx = s.tx - s.x, dy = s.ty - s.y;
    double c = std::cos(s.heading), sn = std::sin(s.heading);
    return {c * dx + sn * dy, -sn * dx + c * dy, std::hypot(dx, dy)};
  }

  double advance(State& s, double control) const {
    s.heading += turn_rate * control;
    s.x += speed * std::cos(s.heading);
    s.y += speed * std::sin(s.heading);
    return std::hypot(s.tx - s.x, s.ty - s.y);
  }
};

// One collected episode; returns the final distance.
inline double point_reach_episode(const PointReach& task, const Td3Agent& agent, Rng& rng,
                                  bool explore, EpisodeRecord* rec) {
  PointReach::State s = task.start(rng);
  RecurrentState state;
  state.reset(agent.hidden());
  double dist = 0.0;
  for (int t = 0; t < task.steps; ++t) {
    std::vector<double> obs = task.observe(s);
    if (rec) {
      rec->h.push_back(state.h);
      rec->c.push_back(state.c);
    }
    double a = agent.act(obs, state, rng, explore);
    dist = task.advance(s, a);
    if (rec) {
      rec->obs.push_back(std::move(obs));
      rec->action.push_back(a);
      rec->reward.push_back(-dist);
      rec->done.push_back(t + 1 == task.steps ? 1 : 0);
    }
  }
  return dist;
}

inline void train_point_reach(const PointReach& task, Td3Agent& agent, ReplayBuffer& buffer,
                              int episodes, uint64_t seed, int update_every, int warmup_steps) {
  Rng collect = Rng::derive(seed, "collect");
  Rng update = Rng::derive(seed, "update");
  long steps = 0;
  for (int ep = 0; ep < episodes; ++ep) {
    EpisodeRecord rec;
    point_reach_episode(task, agent, collect, true, &rec);
    buffer.add(rec);
    for (int t = 0; t < task.steps; ++t) {
      ++steps;
      if (steps > warmup_steps && steps % update_every == 0) agent.update(buffer, update);
    }
  }
}

inline double eval_point_reach(const PointReach& task, const Td3Agent& agent, int episodes,
                               uint64_t seed) {
  Rng rng = Rng::derive(seed, "eval");
  double total = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    total += point_reach_episode(task, agent, rng, false, nullptr);
  }
  return total / episodes;
}

// Two-armed bandit over single-step episodes: arm 1 pays +1, arm 0 pays 0.
inline const std::vector<double>& bandit_obs() {
  static const std::vector<double> obs{1.0, 0.0};
  return obs;
}

inline void train_bandit(PpoAgent& agent, int rollouts, int episodes_per_rollout, uint64_t seed) {
  Rng rng = Rng::derive(seed, "bandit");
  for (int r = 0; r < rollouts; ++r) {
    RolloutBuffer roll;
    for (int e = 0; e < episodes_per_rollout; ++e) {
      roll.begin_episode();
      PpoState st;
      st.reset(agent.hidden());
      double logp = 0.0, value = 0.0;
      int a = agent.act(bandit_obs(), st, rng, &logp, &value);
      roll.push(PpoStep{bandit_obs(), a, logp, value, 0.0});
      roll.set_last_reward(a == 1 ? 1.0 : 0.0);
      roll.end_episode();
    }
    agent.update(roll);
  }
}

inline double bandit_arm1_prob(const PpoAgent& agent, int samples, uint64_t seed) {
  Rng rng = Rng::derive(seed, "bandit_eval");
  int ones = 0;
  for (int i = 0; i < samples; ++i) {
    PpoState st;
    st.reset(agent.hidden());
    double logp = 0.0, value = 0.0;
    if (agent.act(bandit_obs(), st, rng, &logp, &value) == 1) ++ones;
  }
  return static_cast<double>(ones) / samples;
}

// Constant-velocity opponent with noise that grows linearly in elapsed time:
// truth = anchor + v * elapsed * dir + 0.002 * elapsed * (eta_x, eta_y).
struct SyntheticDrift {
  double v = 0.02;
  double dir_x = std::cos(0.7);
  double dir_y = std::sin(0.7);
  double noise = 0.002;
  int max_elapsed = 20;

  OppPair sample(Rng& rng) const {
    OppPair p;
    p.anchor = {rng.u01(), rng.u01()};
    p.elapsed = 1.0 + static_cast<double>(rng.uniform_int(max_elapsed));
    p.truth = {p.anchor.x + v * p.elapsed * dir_x + noise * p.elapsed * rng.normal(),
               p.anchor.y + v * p.elapsed * dir_y + noise * p.elapsed * rng.normal()};
    return p;
  }
};

inline void train_drift_model(const SyntheticDrift& task, OpponentModel& model, int updates,
                              int batch, uint64_t seed) {
  Rng rng = Rng::derive(seed, "drift");
  std::vector<OppPair> chunk(batch);
  for (int u = 0; u < updates; ++u) {
    for (int b = 0; b < batch; ++b) chunk[b] = task.sample(rng);
    model.update(chunk);
  }
}

}  // namespace peec::toytask
