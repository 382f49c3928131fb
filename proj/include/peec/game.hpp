#pragma once
#include <optional>
#include <string>

#include "peec/rng.hpp"
#include "peec/vec2.hpp"

namespace peec {

enum class Status { Running, Caught, Eliminated, Timeout };

std::string to_string(Status s);
Status status_from_string(const std::string& s);

struct CostCoeffs {
  double time = 0.0;      // per-second cost while the episode runs
  double query = 0.0;     // per-query cost (pursuer only)
  double boundary = 0.0;  // per-second cost while touching the map edge
  double accel = 0.0;     // per-second cost times |control|
};

struct GameConfig {
  double map_w = 1.0;
  double map_h = 1.0;
  double dt = 1.0;
  int horizon = 1000;
  double capture_radius = 0.025;
  double shooting_radius = 0.05;
  double v_p = 0.007716;
  double v_e = 0.007716;
  double omega_max = 0.9 * std::numbers::pi;  // rad/s, full-stick turn rate
  double catch_bonus = 1000.0;
  double shot_penalty = 100.0;
  CostCoeffs pursuer_cost{0.5, 0.0, 10.0, 0.5};
  CostCoeffs evader_cost{-0.5, 0.0, 10.0, 0.5};
  bool randomize_shooting_radius = false;
  double shooting_radius_lo = 1.0;  // in multiples of capture_radius
  double shooting_radius_hi = 4.0;
  bool randomize_speed_ratio = false;
  double speed_ratio_lo = 0.1;  // v_e / v_p
  double speed_ratio_hi = 4.0;
};

struct AgentState {
  Vec2 pos;
  double heading = 0.0;
};

// per-episode resolved randomization
struct EpisodeParams {
  double shooting_radius = 0.05;
  double v_p = 0.007716;
  double v_e = 0.007716;
};

struct GameState {
  int t = 0;
  int t0 = 0;  // step index just after the most recent successful query
  AgentState pursuer;
  AgentState evader;
  Vec2 last_observed_evader;
  Vec2 last_observed_pursuer;
  int n_queries = 0;
  Status status = Status::Running;
  double cum_payoff_p = 0.0;
  double cum_payoff_e = 0.0;
  EpisodeParams params;
};

struct StepAction {
  double a_p = 0.0;  // normalized turn command in [-1, 1]
  double a_e = 0.0;
  int q_p = 0;  // 1 = query the mediator this step
};

struct StepResult {
  double reward_p = 0.0;
  double reward_e = 0.0;
  Status status = Status::Running;
  std::optional<double> eliminated_draw;  // lottery draw when q_p = 1
  double dist = 0.0;                      // post-integration separation
  bool boundary_p = false;
  bool boundary_e = false;
};

// P(eliminated | query at separation r) = 2^(-r / r_e); requires r_e > 0
double elimination_probability(double r, double r_e);

// One forward-Euler update. Position uses the pre-update heading; the
// returned flag reports clamping or contact with the map edge.
std::pair<AgentState, bool> integrate(const AgentState& s, double v, double control,
                                      const GameConfig& cfg);

GameState reset(const GameConfig& cfg, Rng& rng);

// Advances one step in place. Throws std::logic_error if the episode is over.
StepResult step(const GameConfig& cfg, GameState& state, const StepAction& action, Rng& rng);

}  // namespace peec
