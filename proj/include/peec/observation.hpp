#pragma once
#include <optional>
#include <string>
#include <vector>

#include "peec/game.hpp"

namespace peec {

enum class Side { Pursuer, Evader };

struct Prediction {
  Vec2 pos;
  double sigma = 0.0;
};

// Fixed-shape per-side view. Whatever estimator is in use, the policy network
// always sees the same slots.
struct Observation {
  AgentState own;
  double elapsed = 0.0;  // steps since the opponent was last seen
  Vec2 last_opponent_pos;
  Vec2 estimated_opponent_pos;
  double sigma = 0.0;  // estimator confidence, map units
  bool fresh = false;  // estimate equals ground truth this step
  double v_self = 0.0;
  double v_opp = 0.0;
  double capture_radius = 0.0;
  double shooting_radius = 0.0;
  double omega_max = 0.0;
};

// Speeds are encoded relative to this constant (map units per second).
inline constexpr double kFeatureSpeedScale = 0.05;
inline constexpr int kFeatureDim = 16;
inline constexpr int kFeatureSchemaVersion = 1;

// When no prediction is supplied the estimator falls back to holding the last
// observed position with sigma = v_opp * elapsed * dt.
Observation build_observation(const GameConfig& cfg, const GameState& state, Side side,
                              const std::optional<Prediction>& prediction = std::nullopt);

std::vector<double> encode_features(const Observation& obs, const GameConfig& cfg);

std::vector<std::string> feature_names();
std::string feature_schema_json();
void write_feature_schema(const std::string& path);

// Gaussian confidence score: |truth - predicted| / (2*sigma + eps)
// + 0.5*log(sigma + eps). Minimized over sigma at sigma = |error| as eps -> 0.
double prediction_feedback(const Vec2& predicted, double sigma, const Vec2& truth,
                           double eps = 1e-6);

}  // namespace peec
