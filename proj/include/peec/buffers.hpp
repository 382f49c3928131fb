#pragma once
#include <cstddef>
#include <utility>
#include <vector>

#include "peec/rng.hpp"

namespace peec {

// One policy-side episode as collected: per-step features, the acting
// network's recurrent state before each step, actions, and rewards. done
// marks terminal steps (always the last step here; episodes are finite).
struct EpisodeRecord {
  std::vector<std::vector<double>> obs;
  std::vector<std::vector<double>> h;
  std::vector<std::vector<double>> c;
  std::vector<double> action;
  std::vector<double> reward;
  std::vector<unsigned char> done;
  int length() const { return static_cast<int>(action.size()); }
};

// Fixed-length run of consecutive steps from a single episode plus the
// recurrent state the behavior actor had before the first of them. obs holds
// len+1 rows; the trailing row is the observation after the final step and is
// all zeros when that step was terminal (it is masked by done there).
struct ReplayWindow {
  std::vector<double> h0, c0;
  std::vector<double> obs;          // (len+1) x obs_dim, row-major
  std::vector<double> action;       // len
  std::vector<double> reward;       // len
  std::vector<unsigned char> done;  // len
  int len = 0;
  int obs_dim = 0;
};

// Ring of training windows cut from whole episodes: stride-`window` segments
// plus, when the length is not a multiple of the stride, one extra window
// covering the final `window` steps so terminal transitions are always kept.
// Episodes shorter than one window contribute nothing. Capacity is given in
// transitions and rounded down to whole windows.
class ReplayBuffer {
 public:
  ReplayBuffer(long capacity_transitions, int window_len);
  void add(const EpisodeRecord& episode);
  const ReplayWindow& sample(Rng& rng) const;  // uniform over stored windows
  std::size_t windows() const { return ring_.size(); }
  long transitions() const { return static_cast<long>(ring_.size()) * window_; }
  int window_len() const { return window_; }

 private:
  int window_ = 8;
  std::size_t capacity_windows_ = 0;
  std::vector<ReplayWindow> ring_;
  std::size_t next_ = 0;
};

// One binary query decision with everything PPO needs to replay it.
struct PpoStep {
  std::vector<double> obs;
  int action = 0;
  double logp = 0.0;
  double value = 0.0;
  double reward = 0.0;
};

struct PpoEpisode {
  std::vector<PpoStep> steps;
};

// (advantages, returns) for one finite episode; the value after the terminal
// step is zero, so every episode bootstraps to nothing at its end.
std::pair<std::vector<double>, std::vector<double>> gae(const std::vector<double>& rewards,
                                                        const std::vector<double>& values,
                                                        double gamma, double lambda);

// On-policy storage of complete decision episodes. `decisions` counts only
// steps inside closed episodes, so an update never consumes a partial one.
class RolloutBuffer {
 public:
  void begin_episode();
  void push(PpoStep step);
  void set_last_reward(double r);  // reward lands after the decision is taken
  void end_episode();
  bool in_episode() const { return in_episode_; }
  int decisions() const { return decisions_; }
  const std::vector<PpoEpisode>& episodes() const { return episodes_; }
  void clear();

 private:
  std::vector<PpoEpisode> episodes_;
  PpoEpisode current_;
  bool in_episode_ = false;
  int decisions_ = 0;
};

}  // namespace peec
