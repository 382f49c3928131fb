#pragma once
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "peec/game.hpp"

namespace peec {

// Post-integration snapshot of step t plus everything that happened during it.
struct StepRecord {
  int t = 0;
  double px = 0, py = 0, ppsi = 0;
  double ex = 0, ey = 0, epsi = 0;
  double a_p = 0, a_e = 0;
  int q = 0;
  std::optional<double> eliminated_draw;
  double reward_p = 0, reward_e = 0;
  Status status = Status::Running;
};

struct EpisodeTrace {
  GameConfig config;
  EpisodeParams params;
  uint64_t seed = 0;
  int episode_index = 0;
  std::vector<StepRecord> steps;

  Status final_status() const { return steps.empty() ? Status::Running : steps.back().status; }
};

StepRecord make_step_record(const GameState& after, const StepAction& action,
                            const StepResult& result);

// JSONL: one header record per episode followed by its step records.
void write_traces(std::ostream& os, const std::vector<EpisodeTrace>& traces);
void write_traces(const std::string& path, const std::vector<EpisodeTrace>& traces);
std::vector<EpisodeTrace> read_traces(std::istream& is);
std::vector<EpisodeTrace> read_traces(const std::string& path);

}  // namespace peec
