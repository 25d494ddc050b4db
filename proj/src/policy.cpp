#include "ehsched/policy.hpp"

#include <cmath>

namespace ehsched {

int argmax_first(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Decision threshold_decision(std::span<const double> distances, int e, double tau) {
  if (e <= 0) return {0};
  const int best = argmax_first(distances);
  if (distances[best] <= tau) return {0};
  return {best + 1};
}

Decision optimal_schedule(std::span<const Vec> x, int e, int t, const ThresholdTable& thresholds,
                          std::span<const Vec> centers) {
  if (e <= 0) return {0};
  Vec d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = std::sqrt(squared_distance(x[i], centers[i]));
  return threshold_decision(d, e, thresholds.tau(t, e));
}

Vec optimal_estimate(const std::optional<Vec>& y, const Vec& center) {
  return y ? *y : center;
}

Decision weighted_region_decision(double q1, double q2, int e, double tau1, double tau2) {
  if (e <= 0) return {0};
  if (q1 <= tau1 && q2 <= tau2) return {0};
  if (q1 > tau1 && q1 - q2 >= tau1 - tau2) return {1};
  return {2};
}

Decision weighted_schedule(std::span<const Vec> x, int e, int t,
                           const GeneralThresholdTable& thresholds,
                           std::span<const double> weights, std::span<const Vec> centers) {
  if (x.size() != 2) throw DomainError("weighted_schedule is defined for two sensors");
  if (e <= 0) return {0};
  const double q1 = weights[0] * squared_distance(x[0], centers[0]);
  const double q2 = weights[1] * squared_distance(x[1], centers[1]);
  return weighted_region_decision(q1, q2, e, thresholds.tau(t, e, 1), thresholds.tau(t, e, 2));
}

Decision blind_schedule(int e, std::span<const double> moments) {
  if (e <= 0) return {0};
  return {argmax_first(moments) + 1};
}

Vec blind_estimate(const std::optional<Vec>& y, const Vec& mean) { return y ? *y : mean; }

}  // namespace ehsched
