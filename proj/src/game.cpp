#include "peec/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace peec {

std::string to_string(Status s) {
  switch (s) {
    case Status::Running: return "Running";
    case Status::Caught: return "Caught";
    case Status::Eliminated: return "Eliminated";
    case Status::Timeout: return "Timeout";
  }
  return "Running";
}

Status status_from_string(const std::string& s) {
  if (s == "Caught") return Status::Caught;
  if (s == "Eliminated") return Status::Eliminated;
  if (s == "Timeout") return Status::Timeout;
  if (s == "Running") return Status::Running;
  throw std::invalid_argument("unknown status: " + s);
}

double elimination_probability(double r, double r_e) {
  if (r_e <= 0.0) throw std::invalid_argument("elimination_probability: r_e must be > 0");
  return std::exp2(-r / r_e);
}

std::pair<AgentState, bool> integrate(const AgentState& s, double v, double control,
                                      const GameConfig& cfg) {
  double a = std::clamp(control, -1.0, 1.0);
  AgentState out;
  out.pos.x = s.pos.x + v * cfg.dt * std::cos(s.heading);
  out.pos.y = s.pos.y + v * cfg.dt * std::sin(s.heading);
  out.heading = wrap_angle(s.heading + a * cfg.omega_max * cfg.dt);
  Vec2 raw = out.pos;
  out.pos.x = std::clamp(out.pos.x, 0.0, cfg.map_w);
  out.pos.y = std::clamp(out.pos.y, 0.0, cfg.map_h);
  bool contact = raw.x != out.pos.x || raw.y != out.pos.y || out.pos.x == 0.0 ||
                 out.pos.x == cfg.map_w || out.pos.y == 0.0 || out.pos.y == cfg.map_h;
  return {out, contact};
}

GameState reset(const GameConfig& cfg, Rng& rng) {
  GameState st;
  st.pursuer.pos = {rng.uniform(0.0, cfg.map_w), rng.uniform(0.0, cfg.map_h)};
  st.pursuer.heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
  st.evader.pos = {rng.uniform(0.0, cfg.map_w), rng.uniform(0.0, cfg.map_h)};
  st.evader.heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
  st.params.shooting_radius = cfg.shooting_radius;
  st.params.v_p = cfg.v_p;
  st.params.v_e = cfg.v_e;
  if (cfg.randomize_shooting_radius) {
    st.params.shooting_radius =
        cfg.capture_radius * rng.uniform(cfg.shooting_radius_lo, cfg.shooting_radius_hi);
  }
  if (cfg.randomize_speed_ratio) {
    st.params.v_e = cfg.v_p * rng.uniform(cfg.speed_ratio_lo, cfg.speed_ratio_hi);
  }
  st.last_observed_evader = st.evader.pos;
  st.last_observed_pursuer = st.pursuer.pos;
  return st;
}

StepResult step(const GameConfig& cfg, GameState& state, const StepAction& action, Rng& rng) {
  if (state.status != Status::Running) {
    throw std::logic_error("step: episode already terminated (" + to_string(state.status) + ")");
  }
  StepResult res;
  double a_p = std::clamp(action.a_p, -1.0, 1.0);
  double a_e = std::clamp(action.a_e, -1.0, 1.0);

  auto [p_next, p_contact] = integrate(state.pursuer, state.params.v_p, a_p, cfg);
  auto [e_next, e_contact] = integrate(state.evader, state.params.v_e, a_e, cfg);
  state.pursuer = p_next;
  state.evader = e_next;
  res.boundary_p = p_contact;
  res.boundary_e = e_contact;
  res.dist = distance(state.pursuer.pos, state.evader.pos);

  Status next = Status::Running;
  if (action.q_p == 1) {
    state.n_queries += 1;
    double u = rng.u01();
    res.eliminated_draw = u;
    if (u < elimination_probability(res.dist, state.params.shooting_radius)) {
      next = Status::Eliminated;
    } else {
      state.t0 = state.t + 1;
      state.last_observed_evader = state.evader.pos;
      state.last_observed_pursuer = state.pursuer.pos;
    }
  }

  const CostCoeffs& cp = cfg.pursuer_cost;
  const CostCoeffs& ce = cfg.evader_cost;
  res.reward_p = -(cp.time + cp.query * (action.q_p == 1 ? 1.0 : 0.0) +
                   cp.boundary * (res.boundary_p ? 1.0 : 0.0) + cp.accel * std::abs(a_p)) *
                 cfg.dt;
  res.reward_e =
      -(ce.time + ce.boundary * (res.boundary_e ? 1.0 : 0.0) + ce.accel * std::abs(a_e)) * cfg.dt;

  if (next == Status::Running && res.dist < cfg.capture_radius) next = Status::Caught;
  if (next == Status::Running && state.t + 1 >= cfg.horizon) next = Status::Timeout;

  if (next == Status::Caught) {
    res.reward_p += cfg.catch_bonus;
    res.reward_e += -cfg.catch_bonus;
  } else if (next == Status::Eliminated) {
    res.reward_p += -cfg.shot_penalty;
  }

  state.t += 1;
  state.status = next;
  res.status = next;
  state.cum_payoff_p += res.reward_p;
  state.cum_payoff_e += res.reward_e;
  return res;
}

}  // namespace peec
