#pragma once
#include <vector>

namespace peec {

struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_strategy;  // maximizer mix
  std::vector<double> col_strategy;  // minimizer mix
};

// Exact value and optimal mixed strategies of a finite zero-sum matrix game
// where the row player maximizes payoff[i][j]. Solved as a pair of primal and
// dual linear programs on the positively shifted matrix.
MatrixGameSolution solve_matrix_game(const std::vector<std::vector<double>>& payoff);

// Largest guarantee violation of a proposed solution: how far the row mix
// falls short of the value on some column, or the column mix exceeds it on
// some row. Zero (up to LP tolerance) certifies an equilibrium.
double matrix_game_residual(const std::vector<std::vector<double>>& payoff,
                            const MatrixGameSolution& sol);

}  // namespace peec
