#pragma once

// Executable decision rules: the optimal threshold scheduler with
// center estimators, its unequal-weight form, and the blind baseline.

#include <optional>
#include <span>
#include <vector>

#include "ehsched/dp.hpp"
#include "ehsched/model.hpp"

namespace ehsched {

// u = 0 keeps every sensor silent; u = i schedules sensor i (1-based).
struct Decision {
  int u = 0;

  bool transmits() const { return u != 0; }
  friend bool operator==(Decision, Decision) = default;
};

// Smallest index among the maximizers.
int argmax_first(std::span<const double> values);

// Uniform-weight rule on precomputed distances d_i = ||x_i - a_i||: silent
// when e = 0 or max_i d_i <= tau, otherwise the first maximizer.
Decision threshold_decision(std::span<const double> distances, int e, double tau);

Decision optimal_schedule(std::span<const Vec> x, int e, int t, const ThresholdTable& thresholds,
                          std::span<const Vec> centers);

Vec optimal_estimate(const std::optional<Vec>& y, const Vec& center);

// Two-sensor region on weighted squared deviations q_i = w_i ||x_i - a_i||^2
// with unsquared thresholds tau_i.
Decision weighted_region_decision(double q1, double q2, int e, double tau1, double tau2);

Decision weighted_schedule(std::span<const Vec> x, int e, int t,
                           const GeneralThresholdTable& thresholds,
                           std::span<const double> weights, std::span<const Vec> centers);

// Transmit the largest-variance source whenever the battery is nonempty.
Decision blind_schedule(int e, std::span<const double> moments);

Vec blind_estimate(const std::optional<Vec>& y, const Vec& mean);

}  // namespace ehsched
