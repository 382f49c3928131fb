#include "peec/policy.hpp"

#include <algorithm>
#include <cmath>

namespace peec {

std::unique_ptr<QueryPolicy> NoCommPolicy::clone() const {
  return std::make_unique<NoCommPolicy>(*this);
}

int RandomCommPolicy::act(const Observation& obs, Rng& rng) {
  double d_hat = distance(obs.estimated_opponent_pos, obs.own.pos);
  double p = 1.0 - std::exp2(-d_hat / obs.shooting_radius);
  return rng.u01() < p ? 1 : 0;
}

std::unique_ptr<QueryPolicy> RandomCommPolicy::clone() const {
  return std::make_unique<RandomCommPolicy>(*this);
}

PeriodicCommPolicy::PeriodicCommPolicy(int k) : k(k) {}

void PeriodicCommPolicy::reset_episode() {
  t_ = 0;
  t_last_ = 0;
}

int PeriodicCommPolicy::act(const Observation&, Rng&) {
  int q = 0;
  if (t_ - t_last_ >= k) {
    t_last_ = t_;
    q = 1;
  }
  t_ += 1;
  return q;
}

std::unique_ptr<QueryPolicy> PeriodicCommPolicy::clone() const {
  return std::make_unique<PeriodicCommPolicy>(*this);
}

static double steer_towards(const Observation& obs, double desired_heading) {
  double err = wrap_angle(desired_heading - obs.own.heading);
  return std::clamp(kHeuristicTurnGain * err, -1.0, 1.0);
}

double PurePursuitNav::act(const Observation& obs, Rng&) {
  Vec2 d = obs.estimated_opponent_pos - obs.own.pos;
  if (d.norm() == 0.0) return 0.0;
  return steer_towards(obs, std::atan2(d.y, d.x));
}

std::unique_ptr<NavPolicy> PurePursuitNav::clone() const {
  return std::make_unique<PurePursuitNav>(*this);
}

EvasiveNav::EvasiveNav(double map_w, double map_h, double margin)
    : map_w(map_w), map_h(map_h), margin(margin) {}

double EvasiveNav::act(const Observation& obs, Rng&) {
  const Vec2& p = obs.own.pos;
  bool near_edge = p.x < margin || p.x > map_w - margin || p.y < margin || p.y > map_h - margin;
  if (near_edge) {
    Vec2 c{map_w / 2.0, map_h / 2.0};
    Vec2 d = c - p;
    if (d.norm() == 0.0) return 0.0;
    return steer_towards(obs, std::atan2(d.y, d.x));
  }
  Vec2 away = p - obs.estimated_opponent_pos;
  if (away.norm() == 0.0) return 0.0;  // degenerate estimate: hold heading
  return steer_towards(obs, std::atan2(away.y, away.x));
}

std::unique_ptr<NavPolicy> EvasiveNav::clone() const {
  return std::make_unique<EvasiveNav>(*this);
}

}  // namespace peec
