#include "peec/toygame.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace peec {
namespace {

void validate(const ToyGame& g) {
  if (!g.zero_sum)
    throw std::invalid_argument("toy game: only the zero-sum variant is solvable");
  if (g.n < 1) throw std::invalid_argument("toy game: grid side must be >= 1");
  if (g.horizon < 0) throw std::invalid_argument("toy game: negative horizon");
  if (g.pursuer_speed < 0) throw std::invalid_argument("toy game: negative speed");
  if (g.d_e < 1) throw std::invalid_argument("toy game: d_e must be >= 1");
  if (g.start_p < 0 || g.start_p >= g.cells() || g.start_e < 0 || g.start_e >= g.cells())
    throw std::invalid_argument("toy game: start cell out of range");
}

std::vector<std::vector<int>> move_table(const ToyGame& g, int speed) {
  std::vector<std::vector<int>> table(g.cells());
  for (int cell = 0; cell < g.cells(); ++cell) table[cell] = toy_moves(g, cell, speed);
  return table;
}

}  // namespace

std::vector<int> toy_moves(const ToyGame& g, int cell, int speed) {
  const int x = cell % g.n;
  const int y = cell / g.n;
  std::vector<int> out;
  for (int dy = -speed; dy <= speed; ++dy) {
    const int budget = speed - std::abs(dy);
    for (int dx = -budget; dx <= budget; ++dx) {
      const int nx = x + dx;
      const int ny = y + dy;
      if (nx < 0 || nx >= g.n || ny < 0 || ny >= g.n) continue;
      out.push_back(ny * g.n + nx);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double toy_elimination_prob(const ToyGame& g, int p_cell, int e_cell) {
  const int dx = std::abs(p_cell % g.n - e_cell % g.n);
  const int dy = std::abs(p_cell / g.n - e_cell / g.n);
  const int cheb = std::max(dx, dy);
  return std::exp2(-static_cast<double>(cheb) / static_cast<double>(g.d_e));
}

SolveResult solve_minimax(const ToyGame& g, double query_penalty) {
  validate(g);
  const int cells = g.cells();
  const int pairs = g.pairs();
  const auto p_moves = move_table(g, g.pursuer_speed);
  const auto e_moves = move_table(g, 1);

  SolveResult res;
  res.value.assign(g.horizon + 1, std::vector<double>(pairs, 0.0));
  res.strategy.assign(g.horizon, std::vector<StageStrategy>(pairs));
  for (int p = 0; p < cells; ++p) res.value[g.horizon][p * cells + p] = g.catch_bonus;

  std::vector<std::vector<double>> stage;
  for (int t = g.horizon - 1; t >= 0; --t) {
    const auto& next = res.value[t + 1];
    for (int p = 0; p < cells; ++p) {
      for (int e = 0; e < cells; ++e) {
        const int idx = p * cells + e;
        if (p == e) {
          res.value[t][idx] = g.catch_bonus;
          continue;
        }
        const auto& mp = p_moves[p];
        const auto& me = e_moves[e];
        stage.assign(mp.size() * 2, std::vector<double>(me.size()));
        for (std::size_t mi = 0; mi < mp.size(); ++mi) {
          const int p2 = mp[mi];
          for (int q = 0; q <= 1; ++q) {
            auto& row = stage[mi * 2 + q];
            const double base = -g.time_cost - q * query_penalty;
            for (std::size_t mj = 0; mj < me.size(); ++mj) {
              const int e2 = me[mj];
              const double cont = next[p2 * cells + e2];
              if (q && g.elimination_enabled) {
                const double rho = toy_elimination_prob(g, p2, e2);
                row[mj] = base + rho * -g.shot_penalty + (1.0 - rho) * cont;
              } else {
                row[mj] = base + cont;
              }
            }
          }
        }
        MatrixGameSolution sol = solve_matrix_game(stage);
        res.max_stage_residual =
            std::max(res.max_stage_residual, matrix_game_residual(stage, sol));
        res.value[t][idx] = sol.value;
        res.strategy[t][idx].pursuer = std::move(sol.row_strategy);
        res.strategy[t][idx].evader = std::move(sol.col_strategy);
      }
    }
  }
  res.root_value = res.value[0][g.start_p * cells + g.start_e];
  return res;
}

std::vector<SweepPoint> value_sweep(const ToyGame& g, const std::vector<double>& alphas) {
  if (alphas.empty()) throw std::invalid_argument("value_sweep: empty penalty grid");
  for (std::size_t i = 1; i < alphas.size(); ++i)
    if (alphas[i] <= alphas[i - 1])
      throw std::invalid_argument("value_sweep: penalties must increase strictly");
  std::vector<SweepPoint> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back({a, solve_minimax(g, a).root_value});
  return out;
}

CiacResult ciac_from_sweep(const std::vector<SweepPoint>& sweep,
                           const std::function<double(double)>& value_at, double tol) {
  if (sweep.empty()) throw std::invalid_argument("ciac_from_sweep: empty sweep");
  if (tol <= 0.0) throw std::invalid_argument("ciac_from_sweep: tolerance must be positive");
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (sweep[i].alpha <= sweep[i - 1].alpha)
      throw std::invalid_argument("ciac_from_sweep: sweep not strictly increasing");
  if (sweep.front().value < 0.0) return {CiacResult::Kind::BelowRange, sweep.front().alpha};
  std::size_t first_neg = sweep.size();
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (sweep[i].value < 0.0) {
      first_neg = i;
      break;
    }
  if (first_neg == sweep.size())
    return {CiacResult::Kind::AboveRange, sweep.back().alpha};

  double lo = sweep[first_neg - 1].alpha;
  double hi = sweep[first_neg].alpha;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (value_at(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {CiacResult::Kind::WithinRange, lo};
}

CiacResult ciac_for_game(const ToyGame& g, const std::vector<double>& alphas, double tol) {
  const auto sweep = value_sweep(g, alphas);
  return ciac_from_sweep(
      sweep, [&g](double a) { return solve_minimax(g, a).root_value; }, tol);
}

BiacResult biac_from_equilibrium(const ToyGame& g) {
  const SolveResult solved = solve_minimax(g, 0.0);
  const int cells = g.cells();
  const auto p_moves = move_table(g, g.pursuer_speed);
  const auto e_moves = move_table(g, 1);

  std::vector<double> mass(g.pairs(), 0.0);
  std::vector<double> next(g.pairs(), 0.0);
  mass[g.start_p * cells + g.start_e] = 1.0;

  BiacResult out;
  for (int t = 0; t < g.horizon; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int p = 0; p < cells; ++p) {
      for (int e = 0; e < cells; ++e) {
        const double mu = mass[p * cells + e];
        if (mu <= 0.0) continue;
        if (p == e) {
          out.expected_payoff += mu * g.catch_bonus;
          continue;
        }
        out.expected_payoff += mu * -g.time_cost;
        const StageStrategy& st = solved.strategy[t][p * cells + e];
        const auto& mp = p_moves[p];
        const auto& me = e_moves[e];
        for (std::size_t i = 0; i < st.pursuer.size(); ++i) {
          const double pi = st.pursuer[i];
          if (pi <= 0.0) continue;
          const int p2 = mp[i / 2];
          const int q = static_cast<int>(i % 2);
          for (std::size_t j = 0; j < st.evader.size(); ++j) {
            const double eta = st.evader[j];
            if (eta <= 0.0) continue;
            const int e2 = me[j];
            double flow = mu * pi * eta;
            if (q) {
              out.expected_queries += flow;
              if (g.elimination_enabled) {
                const double rho = toy_elimination_prob(g, p2, e2);
                out.expected_payoff += flow * rho * -g.shot_penalty;
                flow *= 1.0 - rho;
              }
            }
            next[p2 * cells + e2] += flow;
          }
        }
      }
    }
    mass.swap(next);
  }
  for (int p = 0; p < cells; ++p) out.expected_payoff += mass[p * cells + p] * g.catch_bonus;

  out.defined = out.expected_queries > 1e-12;
  if (out.defined) out.value = out.expected_payoff / out.expected_queries;
  return out;
}

OracleCertificate oracle_certificate(const ToyGame& g, const std::vector<double>& alphas,
                                     double tol) {
  OracleCertificate cert;
  cert.max_stage_residual = 0.0;
  cert.sweep.reserve(alphas.size());
  if (alphas.empty()) throw std::invalid_argument("oracle_certificate: empty penalty grid");
  for (std::size_t i = 1; i < alphas.size(); ++i)
    if (alphas[i] <= alphas[i - 1])
      throw std::invalid_argument("oracle_certificate: penalties must increase strictly");
  for (double a : alphas) {
    const SolveResult solved = solve_minimax(g, a);
    cert.sweep.push_back({a, solved.root_value});
    cert.max_stage_residual = std::max(cert.max_stage_residual, solved.max_stage_residual);
  }
  for (std::size_t i = 1; i < cert.sweep.size(); ++i) {
    if (cert.sweep[i].value > cert.sweep[i - 1].value + 1e-9) cert.value_monotone = false;
  }
  cert.ciac = ciac_from_sweep(
      cert.sweep, [&g](double a) { return solve_minimax(g, a).root_value; }, tol);
  cert.biac = biac_from_equilibrium(g);

  if (cert.biac.defined) {
    if (cert.ciac.kind == CiacResult::Kind::WithinRange &&
        cert.biac.value > cert.ciac.value + tol) {
      cert.biac_at_most_ciac = false;
    }
    if (cert.ciac.kind == CiacResult::Kind::BelowRange &&
        cert.biac.value > cert.sweep.front().alpha + tol) {
      cert.biac_at_most_ciac = false;
    }
  }
  return cert;
}

}  // namespace peec
