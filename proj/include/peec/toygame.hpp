#pragma once
#include <functional>
#include <vector>

#include "peec/matrix_game.hpp"

namespace peec {

// Finite-horizon grid pursuit game small enough to solve exactly by backward
// induction over stage matrix games. Cells are indexed y * n + x. The evader
// moves to a 4-neighbor cell or stays; the pursuer moves within an L1 ball of
// radius pursuer_speed and simultaneously decides whether to query. A query
// costs query_penalty and, when elimination is enabled, ends the game with
// -shot_penalty with probability 2^(-chebyshev(p', e') / d_e) evaluated at
// the post-move positions; elimination preempts capture. Capture means both
// players occupy the same cell after moving and pays catch_bonus.
struct ToyGame {
  int n = 3;
  int horizon = 4;
  int pursuer_speed = 1;
  bool elimination_enabled = true;
  int d_e = 1;
  double catch_bonus = 100.0;
  double shot_penalty = 50.0;
  double time_cost = 1.0;
  bool zero_sum = true;
  int start_p = 0;
  int start_e = 0;

  int cells() const { return n * n; }
  int pairs() const { return cells() * cells(); }
};

struct StageStrategy {
  std::vector<double> pursuer;  // over move index * 2 + query flag
  std::vector<double> evader;   // over evader move index
};

struct SolveResult {
  double root_value = 0.0;
  // value[t][p * n^2 + e] for t in [0, horizon]; diagonal entries absorb at
  // catch_bonus at every layer.
  std::vector<std::vector<double>> value;
  // strategy[t][p * n^2 + e] for t in [0, horizon); empty mixes on diagonal.
  std::vector<std::vector<StageStrategy>> strategy;
  double max_stage_residual = 0.0;  // equilibrium certificate across all LPs
};

// Destination cells reachable within L1 distance `speed`, sorted ascending.
std::vector<int> toy_moves(const ToyGame& g, int cell, int speed);

// 2^(-chebyshev/d_e) between two cells, 1.0 at distance zero.
double toy_elimination_prob(const ToyGame& g, int p_cell, int e_cell);

// Exact minimax solve at a fixed per-query penalty for the pursuer. The
// penalty enters the stage payoffs, so the evader optimizes against the
// penalty-inclusive objective. Throws std::invalid_argument on bad dimensions
// or when zero_sum is false.
SolveResult solve_minimax(const ToyGame& g, double query_penalty);

struct SweepPoint {
  double alpha = 0.0;
  double value = 0.0;
};

// Root value at each penalty in `alphas` (must be strictly increasing).
std::vector<SweepPoint> value_sweep(const ToyGame& g, const std::vector<double>& alphas);

struct CiacResult {
  enum class Kind { BelowRange, WithinRange, AboveRange };
  Kind kind = Kind::WithinRange;
  // WithinRange: crossing penalty refined by bisection. BelowRange /
  // AboveRange: the grid edge that bounded the search.
  double value = 0.0;
};

// Largest penalty with nonnegative root value. Scans the precomputed sweep
// for the sign change, then bisects value_at down to `tol`. BelowRange when
// even the smallest grid penalty yields a negative value; AboveRange when no
// grid penalty does.
CiacResult ciac_from_sweep(const std::vector<SweepPoint>& sweep,
                           const std::function<double(double)>& value_at,
                           double tol = 1e-3);
CiacResult ciac_for_game(const ToyGame& g, const std::vector<double>& alphas,
                         double tol = 1e-3);

struct BiacResult {
  bool defined = false;  // false when the zero-penalty equilibrium never queries
  double value = 0.0;    // expected_payoff / expected_queries when defined
  double expected_payoff = 0.0;
  double expected_queries = 0.0;
};

// Pursuer payoff per query under the zero-penalty equilibrium, computed by
// propagating state mass forward through the solved stage strategies.
BiacResult biac_from_equilibrium(const ToyGame& g);

struct OracleCertificate {
  std::vector<SweepPoint> sweep;
  CiacResult ciac;
  BiacResult biac;
  bool value_monotone = true;    // sweep values non-increasing in the penalty
  bool biac_at_most_ciac = true; // vacuously true when either side is undefined
  double max_stage_residual = 0.0;
};

// Full certificate used by the oracle command: sweep, both break-even
// measures, the monotonicity and ordering checks, and the worst stage LP
// residual seen anywhere in the sweep.
OracleCertificate oracle_certificate(const ToyGame& g, const std::vector<double>& alphas,
                                     double tol = 1e-3);

}  // namespace peec
