#pragma once
#include <string>
#include <utility>
#include <vector>

#include "peec/trace.hpp"

namespace peec {

struct EpisodeSummary {
  Status outcome = Status::Running;
  int length = 0;  // T_f
  std::vector<int> query_steps;
  std::vector<double> dist_at_queries;
  double sum_abs_control_p = 0.0;
  double sum_abs_control_e = 0.0;
  double payoff_p = 0.0;
  double payoff_e = 0.0;
  int query_count = 0;
};

// Extracts the per-episode metric ingredients from a terminal trace.
// Throws std::invalid_argument on an unterminated trace.
EpisodeSummary summarize(const EpisodeTrace& trace);

struct MeanStat {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;  // episodes the metric was defined on
  bool defined() const { return n > 0; }
};

struct AggregateReport {
  int n_episodes = 0;
  long total_queries = 0;
  MeanStat p_win, p_shot, p_timeout;  // se is the binomial standard error
  MeanStat c_ratio;                   // mean over episodes of N_Q / T_f
  MeanStat c_gap;                     // nested mean, episodes with >= 2 queries
  MeanStat d_comm;                    // distance at the last query per episode
  MeanStat t_len;
  MeanStat s_p, s_e;  // mean per-episode mean |control|
  double biac = 0.0;  // mean payoff_p / mean N_Q
  bool biac_defined = false;
};

// Throws std::invalid_argument on an empty list.
AggregateReport aggregate(const std::vector<EpisodeSummary>& summaries);

using LabeledReport = std::pair<std::string, AggregateReport>;

// CSV / pretty renderings; undefined cells come out as N/A. P_shot is shown
// as N/A when no episode ever queried (no exposure, the column is vacuous).
std::string report_csv_header();
std::string report_csv_row(const std::string& label, const AggregateReport& r);
std::string render_reports_csv(const std::vector<LabeledReport>& rows);
std::string render_reports_table(const std::vector<LabeledReport>& rows);

}  // namespace peec
