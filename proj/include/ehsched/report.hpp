#pragma once

// Analysis products: threshold surfaces, blind-vs-optimal curves over the
// battery capacity, value of information, and battery equivalence.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ehsched/dp.hpp"
#include "ehsched/model.hpp"
#include "ehsched/stage.hpp"

namespace ehsched {

struct SurfacePoint {
  int t = 0;
  int e = 0;
  double tau = 0.0;
};

std::vector<SurfacePoint> threshold_surface(const ThresholdTable& thresholds);
std::vector<SurfacePoint> threshold_surface(const Instance& instance, const QuadratureConfig& quad,
                                            int threads = 1);

struct VoiRow {
  int capacity = 0;
  double j_blind = 0.0;
  double j_star = 0.0;
  double voi = 0.0;
};

struct VoiCurve {
  std::vector<VoiRow> rows;
  // Capacity with the largest VoI (first on ties).
  int argmax() const;
};

// For each capacity B (initial energy B): J_star = V_1(B), J_blind from the
// closed-form blind cost.
VoiCurve voi_curve(const Instance& instance_template, const std::vector<int>& capacities,
                   const QuadratureConfig& quad, int threads = 1);

enum class PolicyKind { Optimal, Blind };

struct BatteryEquivalent {
  std::optional<int> capacity;  // nullopt when unreachable for B <= max_capacity
  std::string note;
};

// Cost of a policy family as a function of capacity.
double policy_cost(const Instance& instance_template, int capacity, PolicyKind kind,
                   const QuadratureConfig& quad, int threads = 1);

// Smallest capacity in 1..max_capacity (default: horizon) with cost <=
// target.
BatteryEquivalent battery_equivalent(double target_cost, const Instance& instance_template,
                                     PolicyKind kind, const QuadratureConfig& quad = {},
                                     std::optional<int> max_capacity = std::nullopt,
                                     int threads = 1);

void write_surface_csv(std::ostream& out, const std::vector<SurfacePoint>& surface);
void write_voi_csv(std::ostream& out, const VoiCurve& curve);

}  // namespace ehsched
