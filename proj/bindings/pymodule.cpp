#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "peec/config.hpp"
#include "peec/game.hpp"
#include "peec/json_io.hpp"
#include "peec/metrics.hpp"
#include "peec/observation.hpp"
#include "peec/toygame.hpp"
#include "peec/train.hpp"

namespace py = pybind11;

namespace {

// The module speaks JSON strings; the `peec` package turns them into dicts.
// That keeps the ABI surface to plain strings and numbers.

peec::RunConfig config_from_text(const std::string& text) {
  peec::RunConfig cfg = peec::parse_config_json(text);
  peec::validate_config(cfg);
  return cfg;
}

std::string resolve_config(const std::string& profile, const std::string& config_text,
                           const std::vector<std::string>& overrides,
                           std::optional<std::uint64_t> seed) {
  peec::RunConfig cfg = peec::profile_config(profile);
  if (!config_text.empty()) cfg = peec::parse_config_json_onto(cfg, config_text);
  for (const std::string& o : overrides) peec::apply_override(cfg, o);
  if (seed) cfg.seed = *seed;
  peec::apply_env_seed(cfg);
  peec::validate_config(cfg);
  return peec::render_config_json(cfg);
}

peec::json stat_json(const peec::MeanStat& s) {
  if (!s.defined()) return {{"defined", false}, {"n", s.n}};
  return {{"defined", true}, {"mean", s.mean}, {"se", s.se}, {"n", s.n}};
}

peec::json report_json(const peec::AggregateReport& r) {
  peec::json j{{"n_episodes", r.n_episodes}, {"total_queries", r.total_queries},
               {"P_win", stat_json(r.p_win)}, {"P_shot", stat_json(r.p_shot)},
               {"P_timeout", stat_json(r.p_timeout)}, {"C_ratio", stat_json(r.c_ratio)},
               {"C_gap", stat_json(r.c_gap)},         {"C_comm", stat_json(r.d_comm)},
               {"T_len", stat_json(r.t_len)},         {"S_P", stat_json(r.s_p)},
               {"S_E", stat_json(r.s_e)}};
  if (r.biac_defined)
    j["BIAC"] = r.biac;
  else
    j["BIAC"] = nullptr;
  return j;
}

std::string eval_report(const std::string& config_text, const std::string& traces_path) {
  peec::RunConfig cfg = config_from_text(config_text);
  peec::PursuerController pursuer = peec::build_pursuer(cfg);
  peec::EvaderController evader = peec::build_evader(cfg);
  std::vector<peec::EpisodeTrace> traces =
      peec::evaluate(cfg.game, pursuer, evader, cfg.eval_n, cfg.seed, cfg.workers);
  if (!traces_path.empty()) peec::write_traces(traces_path, traces);
  std::vector<peec::EpisodeSummary> summaries;
  summaries.reserve(traces.size());
  for (const auto& t : traces) summaries.push_back(peec::summarize(t));
  peec::json out{{"config", peec::json(cfg)}, {"report", report_json(peec::aggregate(summaries))}};
  return out.dump();
}

std::string episode_trace(const std::string& config_text, std::uint64_t seed) {
  peec::RunConfig cfg = config_from_text(config_text);
  peec::PursuerController pursuer = peec::build_pursuer(cfg);
  peec::EvaderController evader = peec::build_evader(cfg);
  std::vector<peec::EpisodeTrace> traces =
      peec::evaluate(cfg.game, pursuer, evader, 1, seed, 1);
  const peec::EpisodeTrace& tr = traces.at(0);
  peec::json steps = peec::json::array();
  for (const peec::StepRecord& s : tr.steps) {
    steps.push_back({{"t", s.t},
                     {"px", s.px},
                     {"py", s.py},
                     {"ex", s.ex},
                     {"ey", s.ey},
                     {"a_p", s.a_p},
                     {"a_e", s.a_e},
                     {"q", s.q},
                     {"reward_p", s.reward_p},
                     {"reward_e", s.reward_e},
                     {"status", peec::to_string(s.status)}});
  }
  peec::json out{{"seed", tr.seed},
                 {"outcome", peec::to_string(tr.final_status())},
                 {"steps", steps}};
  return out.dump();
}

std::string train_run(const std::string& config_text, const std::string& resume) {
  peec::RunConfig cfg = config_from_text(config_text);
  peec::TrainResult res = peec::train(cfg, resume);
  peec::json rows = peec::json::array();
  for (const peec::ValidationRow& row : res.rows) {
    rows.push_back({{"episode", row.episode},
                    {"report", report_json(row.report)},
                    {"mean_payoff_p", row.mean_payoff_p},
                    {"mean_payoff_e", row.mean_payoff_e}});
  }
  peec::json out{{"episodes_run", res.episodes_run},
                 {"env_steps", res.env_steps},
                 {"log_path", res.log_path},
                 {"last_checkpoint", res.last_checkpoint},
                 {"rows", rows}};
  return out.dump();
}

std::string oracle_report(int n, int horizon, int pursuer_speed, bool elimination_enabled,
                          int d_e, double catch_bonus, double shot_penalty, double time_cost,
                          int start_p, int start_e, const std::vector<double>& alphas,
                          double tol) {
  peec::ToyGame g;
  g.n = n;
  g.horizon = horizon;
  g.pursuer_speed = pursuer_speed;
  g.elimination_enabled = elimination_enabled;
  g.d_e = d_e;
  g.catch_bonus = catch_bonus;
  g.shot_penalty = shot_penalty;
  g.time_cost = time_cost;
  g.start_p = start_p;
  g.start_e = start_e;
  peec::OracleCertificate cert = peec::oracle_certificate(g, alphas, tol);
  peec::json sweep = peec::json::array();
  for (const peec::SweepPoint& p : cert.sweep) sweep.push_back({{"alpha", p.alpha}, {"value", p.value}});
  const char* kind = cert.ciac.kind == peec::CiacResult::Kind::WithinRange ? "within_range"
                     : cert.ciac.kind == peec::CiacResult::Kind::BelowRange ? "below_range"
                                                                            : "above_range";
  peec::json out{{"sweep", sweep},
                 {"ciac", {{"kind", kind}, {"value", cert.ciac.value}}},
                 {"biac",
                  {{"defined", cert.biac.defined},
                   {"value", cert.biac.value},
                   {"expected_payoff", cert.biac.expected_payoff},
                   {"expected_queries", cert.biac.expected_queries}}},
                 {"value_monotone", cert.value_monotone},
                 {"biac_at_most_ciac", cert.biac_at_most_ciac},
                 {"max_stage_residual", cert.max_stage_residual}};
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_peec, m) {
  m.doc() = "Pursuit-evasion-exposure-concealment simulator and learning harness";

  m.def("resolve_config", &resolve_config, py::arg("profile") = "desk",
        py::arg("config_text") = "", py::arg("overrides") = std::vector<std::string>{},
        py::arg("seed") = std::nullopt,
        "Resolved config JSON from a profile, optional JSON document, dotted overrides, "
        "and seed (PEEC_SEED wins over the argument)");
  m.def("eval_report", &eval_report, py::arg("config"), py::arg("traces_path") = "",
        "Evaluate the configured policies; returns {config, report} as JSON");
  m.def("episode_trace", &episode_trace, py::arg("config"), py::arg("seed"),
        "One episode at the given seed; returns steps and outcome as JSON");
  m.def("train", &train_run, py::arg("config"), py::arg("resume") = "",
        "Co-train the full agent stack; returns the validation rows as JSON");
  m.def("oracle", &oracle_report, py::arg("n") = 3, py::arg("horizon") = 6,
        py::arg("pursuer_speed") = 2, py::arg("elimination_enabled") = true,
        py::arg("d_e") = 1, py::arg("catch_bonus") = 100.0, py::arg("shot_penalty") = 50.0,
        py::arg("time_cost") = 1.0, py::arg("start_p") = 0, py::arg("start_e") = 8,
        py::arg("alphas") = std::vector<double>{0, 10, 20, 30, 40, 50}, py::arg("tol") = 1e-3,
        "Exact minimax sweep and break-even certificate on a toy grid game, as JSON");
  m.def("elimination_probability", &peec::elimination_probability, py::arg("r"),
        py::arg("r_e"), "P(eliminated | query at separation r) = 2^(-r/r_e)");
  m.def(
      "prediction_feedback",
      [](double px, double py_, double sigma, double tx, double ty) {
        return peec::prediction_feedback({px, py_}, sigma, {tx, ty});
      },
      py::arg("pred_x"), py::arg("pred_y"), py::arg("sigma"), py::arg("truth_x"),
      py::arg("truth_y"), "Distance-scaled negative log likelihood score");
  m.def("feature_schema", &peec::feature_schema_json,
        "Feature vector layout consumed by the policy networks, as JSON");
}
