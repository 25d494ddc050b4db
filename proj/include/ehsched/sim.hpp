#pragma once

// Monte Carlo episode engine for any (scheduler, estimator) pair.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "ehsched/dp.hpp"
#include "ehsched/model.hpp"
#include "ehsched/policy.hpp"

namespace ehsched {

using Scheduler = std::function<Decision(std::span<const Vec> x, int e, int t)>;
// sensor is 1-based; y is std::nullopt when nothing was received.
using Estimator = std::function<Vec(int sensor, const std::optional<Vec>& y)>;

struct Policy {
  Scheduler scheduler;
  Estimator estimator;
};

Policy make_optimal_policy(const Instance& instance, ThresholdTable thresholds);
Policy make_weighted_policy(const Instance& instance, GeneralThresholdTable thresholds);
Policy make_blind_policy(const Instance& instance);

struct StepRecord {
  int t = 0;
  std::vector<Vec> x;
  int e = 0;
  int u = 0;
  int z = 0;
  std::vector<std::optional<Vec>> y;
  std::vector<Vec> xhat;
  double stage_cost = 0.0;
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
  double total_cost() const;
};

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_episodes = 0;
  std::uint64_t seed = 0;
  // False when n_episodes == 1 (std_error reported as 0).
  bool std_error_defined = false;
};

// Seed of episode k derived from the base seed by a counter-based mix.
std::uint64_t episode_seed(std::uint64_t base_seed, std::uint64_t episode);

// Throws ContractViolation if the scheduler returns an infeasible action.
EpisodeTrace run_episode(const Instance& instance, const Scheduler& scheduler,
                         const Estimator& estimator, std::uint64_t seed);
double episode_cost(const Instance& instance, const Scheduler& scheduler,
                    const Estimator& estimator, std::uint64_t seed);

CostEstimate monte_carlo_cost(const Instance& instance, const Scheduler& scheduler,
                              const Estimator& estimator, long n_episodes,
                              std::uint64_t base_seed, int threads = 1);
CostEstimate monte_carlo_cost(const Instance& instance, const Policy& policy, long n_episodes,
                              std::uint64_t base_seed, int threads = 1);

void write_trace_csv(std::ostream& out, const EpisodeTrace& trace);

}  // namespace ehsched
