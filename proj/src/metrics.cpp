#include "peec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "peec/stats.hpp"

namespace peec {

EpisodeSummary summarize(const EpisodeTrace& trace) {
  if (trace.steps.empty() || trace.final_status() == Status::Running) {
    throw std::invalid_argument("summarize: trace is not terminal");
  }
  EpisodeSummary s;
  s.outcome = trace.final_status();
  s.length = static_cast<int>(trace.steps.size());
  for (const StepRecord& r : trace.steps) {
    if (r.q) {
      s.query_steps.push_back(r.t);
      s.dist_at_queries.push_back(std::hypot(r.px - r.ex, r.py - r.ey));
    }
    s.sum_abs_control_p += std::abs(r.a_p);
    s.sum_abs_control_e += std::abs(r.a_e);
    s.payoff_p += r.reward_p;
    s.payoff_e += r.reward_e;
  }
  s.query_count = static_cast<int>(s.query_steps.size());
  return s;
}

namespace {

MeanStat mean_stat(const std::vector<double>& xs) {
  MeanStat m;
  m.n = static_cast<int>(xs.size());
  if (m.n == 0) return m;
  double sum = 0.0;
  for (double v : xs) sum += v;
  m.mean = sum / m.n;
  if (m.n >= 2) {
    double ss = 0.0;
    for (double v : xs) ss += (v - m.mean) * (v - m.mean);
    m.se = std::sqrt(ss / (m.n - 1)) / std::sqrt(static_cast<double>(m.n));
  }
  return m;
}

MeanStat proportion_stat(int count, int n) {
  MeanStat m;
  m.n = n;
  m.mean = static_cast<double>(count) / n;
  m.se = binomial_se(m.mean, n);
  return m;
}

}  // namespace

AggregateReport aggregate(const std::vector<EpisodeSummary>& summaries) {
  if (summaries.empty()) throw std::invalid_argument("aggregate: no episodes");

  AggregateReport rep;
  rep.n_episodes = static_cast<int>(summaries.size());

  int caught = 0, shot = 0, timeout = 0;
  std::vector<double> ratios, gaps, last_dists, lengths, sp, se;
  double payoff_sum = 0.0;
  long query_sum = 0;
  for (const EpisodeSummary& s : summaries) {
    switch (s.outcome) {
      case Status::Caught: ++caught; break;
      case Status::Eliminated: ++shot; break;
      case Status::Timeout: ++timeout; break;
      case Status::Running: throw std::invalid_argument("aggregate: non-terminal summary");
    }
    ratios.push_back(static_cast<double>(s.query_count) / s.length);
    if (s.query_count >= 2) {
      double gap_sum = 0.0;
      for (size_t j = 1; j < s.query_steps.size(); ++j) {
        gap_sum += s.query_steps[j] - s.query_steps[j - 1];
      }
      gaps.push_back(gap_sum / (s.query_count - 1));
    }
    if (s.query_count >= 1) last_dists.push_back(s.dist_at_queries.back());
    lengths.push_back(static_cast<double>(s.length));
    sp.push_back(s.sum_abs_control_p / s.length);
    se.push_back(s.sum_abs_control_e / s.length);
    payoff_sum += s.payoff_p;
    query_sum += s.query_count;
  }

  rep.total_queries = query_sum;
  rep.p_win = proportion_stat(caught, rep.n_episodes);
  rep.p_shot = proportion_stat(shot, rep.n_episodes);
  rep.p_timeout = proportion_stat(timeout, rep.n_episodes);
  rep.c_ratio = mean_stat(ratios);
  rep.c_gap = mean_stat(gaps);
  rep.d_comm = mean_stat(last_dists);
  rep.t_len = mean_stat(lengths);
  rep.s_p = mean_stat(sp);
  rep.s_e = mean_stat(se);

  double mean_queries = static_cast<double>(query_sum) / rep.n_episodes;
  if (mean_queries > 0.0) {
    rep.biac = (payoff_sum / rep.n_episodes) / mean_queries;
    rep.biac_defined = true;
  }
  return rep;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string cell(const MeanStat& m) { return m.defined() ? fmt(m.mean) : "N/A"; }

std::string cell_pm(const MeanStat& m) {
  if (!m.defined()) return "N/A";
  return fmt(m.mean) + " \xC2\xB1 " + fmt(m.se);
}

struct ReportCells {
  std::vector<std::string> v;
};

ReportCells cells(const AggregateReport& r, bool with_se) {
  auto stat = [&](const MeanStat& m) { return with_se ? cell_pm(m) : cell(m); };
  ReportCells c;
  c.v.push_back(stat(r.p_win));
  c.v.push_back(r.total_queries == 0 ? "N/A" : stat(r.p_shot));
  c.v.push_back(stat(r.p_timeout));
  c.v.push_back(stat(r.c_ratio));
  c.v.push_back(stat(r.c_gap));
  c.v.push_back(stat(r.d_comm));
  c.v.push_back(stat(r.t_len));
  c.v.push_back(stat(r.s_p));
  c.v.push_back(stat(r.s_e));
  c.v.push_back(r.biac_defined ? fmt(r.biac) : "N/A");
  c.v.push_back(std::to_string(r.n_episodes));
  return c;
}

const char* kHeaders[] = {"Model", "P_win", "P_shot", "P_timeout", "C_ratio", "C_gap",
                          "C_comm", "T_len", "S_P",   "S_E",       "BIAC",    "N"};

}  // namespace

std::string report_csv_header() {
  std::string out;
  for (size_t i = 0; i < std::size(kHeaders); ++i) {
    if (i) out += ',';
    out += kHeaders[i];
  }
  return out;
}

std::string report_csv_row(const std::string& label, const AggregateReport& r) {
  std::string out = label;
  for (const std::string& c : cells(r, false).v) {
    out += ',';
    out += c;
  }
  return out;
}

std::string render_reports_csv(const std::vector<LabeledReport>& rows) {
  std::string out = report_csv_header() + "\n";
  for (const auto& [label, rep] : rows) out += report_csv_row(label, rep) + "\n";
  return out;
}

std::string render_reports_table(const std::vector<LabeledReport>& rows) {
  std::vector<std::vector<std::string>> grid;
  grid.emplace_back(std::begin(kHeaders), std::end(kHeaders));
  for (const auto& [label, rep] : rows) {
    std::vector<std::string> row{label};
    for (auto& c : cells(rep, true).v) row.push_back(std::move(c));
    grid.push_back(std::move(row));
  }

  std::vector<size_t> width(grid[0].size(), 0);
  auto display_len = [](const std::string& s) {
    size_t n = 0;
    for (unsigned char ch : s)
      if ((ch & 0xC0) != 0x80) ++n;  // count code points, the +- sign is two bytes
    return n;
  };
  for (const auto& row : grid)
    for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], display_len(row[i]));

  std::ostringstream os;
  for (size_t r = 0; r < grid.size(); ++r) {
    for (size_t i = 0; i < grid[r].size(); ++i) {
      if (i) os << "  ";
      os << grid[r][i] << std::string(width[i] - display_len(grid[r][i]), ' ');
    }
    os << "\n";
    if (r == 0) os << std::string(std::accumulate(width.begin(), width.end(), size_t{0}) +
                                      2 * (width.size() - 1),
                                  '-')
                   << "\n";
  }
  return os.str();
}

}  // namespace peec
