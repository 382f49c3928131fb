#include "peec/trace.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "peec/json_io.hpp"

namespace peec {

StepRecord make_step_record(const GameState& after, const StepAction& action,
                            const StepResult& result) {
  StepRecord r;
  r.t = after.t - 1;  // state.t was incremented by step()
  r.px = after.pursuer.pos.x;
  r.py = after.pursuer.pos.y;
  r.ppsi = after.pursuer.heading;
  r.ex = after.evader.pos.x;
  r.ey = after.evader.pos.y;
  r.epsi = after.evader.heading;
  r.a_p = action.a_p;
  r.a_e = action.a_e;
  r.q = action.q_p;
  r.eliminated_draw = result.eliminated_draw;
  r.reward_p = result.reward_p;
  r.reward_e = result.reward_e;
  r.status = result.status;
  return r;
}

static json record_to_json(const StepRecord& r) {
  json j;
  j["t"] = r.t;
  j["px"] = r.px;
  j["py"] = r.py;
  j["ppsi"] = r.ppsi;
  j["ex"] = r.ex;
  j["ey"] = r.ey;
  j["epsi"] = r.epsi;
  j["a_p"] = r.a_p;
  j["a_e"] = r.a_e;
  j["q"] = r.q;
  if (r.eliminated_draw)
    j["eliminated_draw"] = *r.eliminated_draw;
  else
    j["eliminated_draw"] = nullptr;
  j["reward_p"] = r.reward_p;
  j["reward_e"] = r.reward_e;
  j["status"] = to_string(r.status);
  return j;
}

static StepRecord record_from_json(const json& j) {
  StepRecord r;
  r.t = j.at("t").get<int>();
  r.px = j.at("px").get<double>();
  r.py = j.at("py").get<double>();
  r.ppsi = j.at("ppsi").get<double>();
  r.ex = j.at("ex").get<double>();
  r.ey = j.at("ey").get<double>();
  r.epsi = j.at("epsi").get<double>();
  r.a_p = j.at("a_p").get<double>();
  r.a_e = j.at("a_e").get<double>();
  r.q = j.at("q").get<int>();
  if (!j.at("eliminated_draw").is_null()) r.eliminated_draw = j.at("eliminated_draw").get<double>();
  r.reward_p = j.at("reward_p").get<double>();
  r.reward_e = j.at("reward_e").get<double>();
  r.status = status_from_string(j.at("status").get<std::string>());
  return r;
}

void write_traces(std::ostream& os, const std::vector<EpisodeTrace>& traces) {
  for (const auto& tr : traces) {
    json h;
    h["type"] = "header";
    h["config"] = tr.config;
    h["params"] = tr.params;
    h["seed"] = tr.seed;
    h["episode_index"] = tr.episode_index;
    os << h.dump() << "\n";
    for (const auto& s : tr.steps) os << record_to_json(s).dump() << "\n";
  }
}

void write_traces(const std::string& path, const std::vector<EpisodeTrace>& traces) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_traces: cannot open " + path);
  write_traces(f, traces);
}

std::vector<EpisodeTrace> read_traces(std::istream& is) {
  std::vector<EpisodeTrace> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (j.contains("type") && j["type"] == "header") {
      EpisodeTrace tr;
      tr.config = j.at("config").get<GameConfig>();
      tr.params = j.at("params").get<EpisodeParams>();
      tr.seed = j.at("seed").get<uint64_t>();
      tr.episode_index = j.at("episode_index").get<int>();
      out.push_back(std::move(tr));
    } else {
      if (out.empty()) throw std::runtime_error("read_traces: step record before header");
      out.back().steps.push_back(record_from_json(j));
    }
  }
  return out;
}

std::vector<EpisodeTrace> read_traces(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_traces: cannot open " + path);
  return read_traces(f);
}

}  // namespace peec
