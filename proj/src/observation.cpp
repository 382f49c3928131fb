#include "peec/observation.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "peec/json_io.hpp"

namespace peec {

Observation build_observation(const GameConfig& cfg, const GameState& state, Side side,
                              const std::optional<Prediction>& prediction) {
  Observation obs;
  bool pursuer = side == Side::Pursuer;
  obs.own = pursuer ? state.pursuer : state.evader;
  obs.elapsed = static_cast<double>(state.t - state.t0);
  obs.last_opponent_pos = pursuer ? state.last_observed_evader : state.last_observed_pursuer;
  obs.v_self = pursuer ? state.params.v_p : state.params.v_e;
  obs.v_opp = pursuer ? state.params.v_e : state.params.v_p;
  obs.capture_radius = cfg.capture_radius;
  obs.shooting_radius = state.params.shooting_radius;
  obs.omega_max = cfg.omega_max;

  obs.fresh = state.t == state.t0;
  if (obs.fresh) {
    obs.estimated_opponent_pos = obs.last_opponent_pos;
    obs.sigma = 0.0;
  } else if (prediction) {
    obs.estimated_opponent_pos = prediction->pos;
    obs.sigma = prediction->sigma;
  } else {
    obs.estimated_opponent_pos = obs.last_opponent_pos;
    obs.sigma = obs.v_opp * obs.elapsed * cfg.dt;
  }
  return obs;
}

std::vector<double> encode_features(const Observation& obs, const GameConfig& cfg) {
  double diag = std::hypot(cfg.map_w, cfg.map_h);
  std::vector<double> f(kFeatureDim);
  f[0] = obs.own.pos.x / cfg.map_w;
  f[1] = obs.own.pos.y / cfg.map_h;
  f[2] = std::cos(obs.own.heading);
  f[3] = std::sin(obs.own.heading);
  f[4] = obs.elapsed / cfg.horizon;
  f[5] = obs.last_opponent_pos.x / cfg.map_w;
  f[6] = obs.last_opponent_pos.y / cfg.map_h;
  f[7] = obs.estimated_opponent_pos.x / cfg.map_w;
  f[8] = obs.estimated_opponent_pos.y / cfg.map_h;
  f[9] = obs.sigma / diag;
  f[10] = obs.fresh ? 1.0 : 0.0;
  f[11] = obs.v_self / kFeatureSpeedScale;
  f[12] = obs.v_opp / kFeatureSpeedScale;
  f[13] = obs.capture_radius / diag;
  f[14] = obs.shooting_radius / diag;
  f[15] = obs.omega_max / std::numbers::pi;
  return f;
}

std::vector<std::string> feature_names() {
  return {"own_x_over_w",      "own_y_over_h",      "own_heading_cos", "own_heading_sin",
          "elapsed_over_hmax", "last_opp_x_over_w", "last_opp_y_over_h", "est_opp_x_over_w",
          "est_opp_y_over_h",  "sigma_over_diag",   "fresh",           "v_self_over_scale",
          "v_opp_over_scale",  "capture_radius_over_diag", "shooting_radius_over_diag",
          "omega_max_over_pi"};
}

std::string feature_schema_json() {
  json j;
  j["version"] = kFeatureSchemaVersion;
  j["dim"] = kFeatureDim;
  j["speed_scale"] = kFeatureSpeedScale;
  j["names"] = feature_names();
  return j.dump(2);
}

void write_feature_schema(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_feature_schema: cannot open " + path);
  f << feature_schema_json() << "\n";
}

double prediction_feedback(const Vec2& predicted, double sigma, const Vec2& truth, double eps) {
  double err = distance(truth, predicted);
  return err / (2.0 * sigma + eps) + 0.5 * std::log(sigma + eps);
}

}  // namespace peec
