#include "peec/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace peec {
namespace {

constexpr double kPivotEps = 1e-11;

// max c.x subject to A x <= b, x >= 0, with b >= 0 so the slack basis is
// feasible. Full-tableau primal simplex with Bland's rule (first eligible
// entering column, smallest basis index on ratio ties) so it cannot cycle.
// Fills the primal solution x and the dual vector y read off the slack
// columns of the final objective row. Returns the optimal objective.
double simplex_leq(const std::vector<std::vector<double>>& A,
                   const std::vector<double>& b, const std::vector<double>& c,
                   std::vector<double>& x, std::vector<double>& y) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = 1.0;
    t[i][cols - 1] = b[i];
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  const int max_iters = 50000;
  for (int iter = 0;; ++iter) {
    if (iter >= max_iters) throw std::runtime_error("simplex: iteration limit");
    std::size_t enter = cols - 1;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      if (t[m][j] < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter == cols - 1) break;

    std::size_t leave = m;
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= kPivotEps) continue;
      double ratio = t[i][cols - 1] / t[i][enter];
      if (leave == m || ratio < best - kPivotEps ||
          (ratio <= best + kPivotEps && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) throw std::runtime_error("simplex: unbounded program");

    const double piv = t[leave][enter];
    for (double& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) x[basis[i]] = t[i][cols - 1];
  }
  y.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) y[i] = t[m][n + i];
  return t[m][cols - 1];
}

void clamp_normalize(std::vector<double>& p) {
  double total = 0.0;
  for (double& v : p) {
    if (v < 0.0) v = 0.0;
    total += v;
  }
  if (total <= 0.0) throw std::runtime_error("matrix game: degenerate strategy");
  for (double& v : p) v /= total;
}

}  // namespace

MatrixGameSolution solve_matrix_game(const std::vector<std::vector<double>>& payoff) {
  const std::size_t m = payoff.size();
  if (m == 0 || payoff[0].empty())
    throw std::invalid_argument("solve_matrix_game: empty matrix");
  const std::size_t n = payoff[0].size();
  double lo = payoff[0][0];
  for (const auto& row : payoff) {
    if (row.size() != n) throw std::invalid_argument("solve_matrix_game: ragged matrix");
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("solve_matrix_game: non-finite entry");
      lo = std::min(lo, v);
    }
  }

  // Shift so every entry is >= 1; the game value shifts by the same amount
  // and strategies are unchanged. With the shifted matrix G, the column
  // player's program max sum(w) s.t. G w <= 1 has optimum 1/value, and the
  // dual vector recovers the row player's mix.
  const double shift = 1.0 - lo;
  std::vector<std::vector<double>> a(m, std::vector<double>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = payoff[i][j] + shift;

  std::vector<double> b(m, 1.0);
  std::vector<double> c(n, 1.0);
  std::vector<double> w;
  std::vector<double> y;
  const double s = simplex_leq(a, b, c, w, y);
  if (s <= 0.0) throw std::runtime_error("solve_matrix_game: no positive optimum");
  const double shifted_value = 1.0 / s;

  MatrixGameSolution sol;
  sol.value = shifted_value - shift;
  sol.col_strategy = w;
  sol.row_strategy = y;
  clamp_normalize(sol.col_strategy);
  clamp_normalize(sol.row_strategy);
  return sol;
}

double matrix_game_residual(const std::vector<std::vector<double>>& payoff,
                            const MatrixGameSolution& sol) {
  const std::size_t m = payoff.size();
  const std::size_t n = payoff[0].size();
  if (sol.row_strategy.size() != m || sol.col_strategy.size() != n)
    throw std::invalid_argument("matrix_game_residual: strategy arity mismatch");
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double earned = 0.0;
    for (std::size_t i = 0; i < m; ++i) earned += sol.row_strategy[i] * payoff[i][j];
    worst = std::max(worst, sol.value - earned);
  }
  for (std::size_t i = 0; i < m; ++i) {
    double conceded = 0.0;
    for (std::size_t j = 0; j < n; ++j) conceded += payoff[i][j] * sol.col_strategy[j];
    worst = std::max(worst, conceded - sol.value);
  }
  return worst;
}

}  // namespace peec
