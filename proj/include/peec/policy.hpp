#pragma once
#include <memory>

#include "peec/observation.hpp"
#include "peec/rng.hpp"

namespace peec {

struct NavPolicy {
  virtual ~NavPolicy() = default;
  virtual void reset_episode() {}
  virtual double act(const Observation& obs, Rng& rng) = 0;
  virtual std::unique_ptr<NavPolicy> clone() const = 0;
};

struct QueryPolicy {
  virtual ~QueryPolicy() = default;
  virtual void reset_episode() {}
  virtual int act(const Observation& obs, Rng& rng) = 0;
  virtual std::unique_ptr<QueryPolicy> clone() const = 0;
};

// never queries
struct NoCommPolicy final : QueryPolicy {
  int act(const Observation&, Rng&) override { return 0; }
  std::unique_ptr<QueryPolicy> clone() const override;
};

// P(query) = 1 - 2^(-d_hat / r_e) with d_hat the distance to the estimate
struct RandomCommPolicy final : QueryPolicy {
  int act(const Observation& obs, Rng& rng) override;
  std::unique_ptr<QueryPolicy> clone() const override;
};

// queries exactly when t - t_last_query >= k; first query lands at t = k
struct PeriodicCommPolicy final : QueryPolicy {
  explicit PeriodicCommPolicy(int k);
  void reset_episode() override;
  int act(const Observation&, Rng&) override;
  std::unique_ptr<QueryPolicy> clone() const override;
  int k;

 private:
  int t_ = 0;
  int t_last_ = 0;
};

inline constexpr double kHeuristicTurnGain = 2.0;

// proportional heading control toward the estimated opponent position
struct PurePursuitNav final : NavPolicy {
  double act(const Observation& obs, Rng&) override;
  std::unique_ptr<NavPolicy> clone() const override;
};

// flees the estimated pursuer; steers for the map centre near the boundary
struct EvasiveNav final : NavPolicy {
  explicit EvasiveNav(double map_w = 1.0, double map_h = 1.0, double margin = 0.05);
  double act(const Observation& obs, Rng&) override;
  std::unique_ptr<NavPolicy> clone() const override;
  double map_w, map_h, margin;
};

}  // namespace peec
