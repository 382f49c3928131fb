#pragma once
#include <json.hpp>  // vendored nlohmann single header

#include "peec/config.hpp"
#include "peec/game.hpp"

namespace peec {

using json = nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CostCoeffs, time, query, boundary, accel)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EpisodeParams, shooting_radius, v_p, v_e)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
    GameConfig, map_w, map_h, dt, horizon, capture_radius, shooting_radius, v_p, v_e, omega_max,
    catch_bonus, shot_penalty, pursuer_cost, evader_cost, randomize_shooting_radius,
    shooting_radius_lo, shooting_radius_hi, randomize_speed_ratio, speed_ratio_lo, speed_ratio_hi)

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
    LearnerConfig, train_episodes, hidden, batch_size, lr, gamma, tau, policy_noise, noise_clip,
    policy_delay, exploration_noise, td3_update_every, warmup_steps, max_env_steps,
    replay_capacity, window, ppo_clip, gae_lambda, ppo_epochs, rollout_decisions, entropy_coef,
    opp_batch, eval_freq, eval_episodes)

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunConfig, profile, game, learner, pursuer_nav, pursuer_query,
                                   evader_nav, eval_n, seed, out_dir, workers)

}  // namespace peec
