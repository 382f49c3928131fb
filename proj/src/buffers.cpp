#include "peec/buffers.hpp"

#include <algorithm>
#include <stdexcept>

namespace peec {

ReplayBuffer::ReplayBuffer(long capacity_transitions, int window_len) : window_(window_len) {
  if (window_len < 1) throw std::invalid_argument("replay: window length must be >= 1");
  if (capacity_transitions < window_len)
    throw std::invalid_argument("replay: capacity below one window");
  capacity_windows_ = static_cast<std::size_t>(capacity_transitions / window_len);
}

void ReplayBuffer::add(const EpisodeRecord& ep) {
  const std::size_t t = ep.action.size();
  if (ep.obs.size() != t || ep.h.size() != t || ep.c.size() != t || ep.reward.size() != t ||
      ep.done.size() != t)
    throw std::invalid_argument("replay: episode record fields disagree on length");
  if (t < static_cast<std::size_t>(window_)) return;
  const int obs_dim = static_cast<int>(ep.obs[0].size());

  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + window_ <= t; s += window_) starts.push_back(s);
  if (t % window_ != 0) starts.push_back(t - window_);

  for (std::size_t s : starts) {
    ReplayWindow w;
    w.len = window_;
    w.obs_dim = obs_dim;
    w.h0 = ep.h[s];
    w.c0 = ep.c[s];
    w.obs.reserve(static_cast<std::size_t>(window_ + 1) * obs_dim);
    for (int k = 0; k <= window_; ++k) {
      const std::size_t i = s + k;
      if (i < t) {
        w.obs.insert(w.obs.end(), ep.obs[i].begin(), ep.obs[i].end());
      } else {
        w.obs.insert(w.obs.end(), obs_dim, 0.0);  // past the terminal step; masked by done
      }
    }
    for (int k = 0; k < window_; ++k) {
      w.action.push_back(ep.action[s + k]);
      w.reward.push_back(ep.reward[s + k]);
      w.done.push_back(ep.done[s + k]);
    }
    if (ring_.size() < capacity_windows_) {
      ring_.push_back(std::move(w));
    } else {
      ring_[next_] = std::move(w);
      next_ = (next_ + 1) % capacity_windows_;
    }
  }
}

const ReplayWindow& ReplayBuffer::sample(Rng& rng) const {
  if (ring_.empty()) throw std::logic_error("replay: sample from an empty buffer");
  return ring_[static_cast<std::size_t>(rng.uniform_int(ring_.size()))];
}

std::pair<std::vector<double>, std::vector<double>> gae(const std::vector<double>& rewards,
                                                        const std::vector<double>& values,
                                                        double gamma, double lambda) {
  if (rewards.size() != values.size())
    throw std::invalid_argument("gae: rewards and values disagree on length");
  const int t_len = static_cast<int>(rewards.size());
  std::vector<double> adv(t_len, 0.0);
  std::vector<double> ret(t_len, 0.0);
  double acc = 0.0;
  for (int t = t_len - 1; t >= 0; --t) {
    const double next_v = t + 1 < t_len ? values[t + 1] : 0.0;
    const double delta = rewards[t] + gamma * next_v - values[t];
    acc = delta + gamma * lambda * acc;
    adv[t] = acc;
    ret[t] = acc + values[t];
  }
  return {std::move(adv), std::move(ret)};
}

void RolloutBuffer::begin_episode() {
  if (in_episode_) throw std::logic_error("rollout: begin_episode while one is open");
  current_.steps.clear();
  in_episode_ = true;
}

void RolloutBuffer::push(PpoStep step) {
  if (!in_episode_) throw std::logic_error("rollout: push outside an episode");
  current_.steps.push_back(std::move(step));
}

void RolloutBuffer::set_last_reward(double r) {
  if (!in_episode_ || current_.steps.empty())
    throw std::logic_error("rollout: no decision to attach a reward to");
  current_.steps.back().reward = r;
}

void RolloutBuffer::end_episode() {
  if (!in_episode_) throw std::logic_error("rollout: end_episode without begin");
  in_episode_ = false;
  if (current_.steps.empty()) return;
  decisions_ += static_cast<int>(current_.steps.size());
  episodes_.push_back(std::move(current_));
  current_ = {};
}

void RolloutBuffer::clear() {
  episodes_.clear();
  current_ = {};
  in_episode_ = false;
  decisions_ = 0;
}

}  // namespace peec
