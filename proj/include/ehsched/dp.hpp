#pragma once

// Backward induction over (time, battery level) for the optimal threshold
// scheduler. Stage expectations are delegated to StageExpectation; the
// harvest expectation is an exact finite sum.

#include <span>
#include <vector>

#include "ehsched/model.hpp"
#include "ehsched/stage.hpp"

namespace ehsched {

// V_t(e) for t in 1..T+1, e in 0..B. Row T+1 is identically zero.
class ValueTable {
 public:
  ValueTable(int horizon, int capacity);

  int horizon() const { return horizon_; }
  int capacity() const { return capacity_; }
  double at(int t, int e) const { return values_[index(t, e)]; }
  double& at(int t, int e) { return values_[index(t, e)]; }
  std::span<const double> row(int t) const;

 private:
  std::size_t index(int t, int e) const;

  int horizon_;
  int capacity_;
  Vec values_;
};

// Thresholds and continuation costs for t in 1..T, e in 0..B. Entries at
// e = 0 hold C0 only; tau and C1 are NaN there since no transmission is
// feasible.
class ThresholdTable {
 public:
  ThresholdTable(int horizon, int capacity);

  int horizon() const { return horizon_; }
  int capacity() const { return capacity_; }
  // Radius of the no-transmission region: compare against ||x - a||.
  double tau(int t, int e) const { return tau_[index(t, e)]; }
  double c0(int t, int e) const { return c0_[index(t, e)]; }
  double c1(int t, int e) const { return c1_[index(t, e)]; }
  double kappa(int t, int e) const { return c1(t, e) - c0(t, e); }

  void set(int t, int e, double tau, double c0, double c1);

 private:
  std::size_t index(int t, int e) const;

  int horizon_;
  int capacity_;
  Vec tau_, c0_, c1_;
};

// Per-sensor thresholds for unequal weights/costs, stored unsquared:
// sensor i is compared through w_i ||x_i - a_i||^2 against tau_i.
class GeneralThresholdTable {
 public:
  GeneralThresholdTable(int horizon, int capacity, int num_sensors);

  int horizon() const { return horizon_; }
  int capacity() const { return capacity_; }
  int num_sensors() const { return num_sensors_; }
  // i is 1-based to match the action labels.
  double tau(int t, int e, int i) const { return tau_[index(t, e, i)]; }
  double c1(int t, int e, int i) const { return c1_[index(t, e, i)]; }
  double c0(int t, int e) const;

  void set(int t, int e, double c0, std::span<const double> c1, std::span<const double> tau);

 private:
  std::size_t index(int t, int e, int i) const;

  int horizon_;
  int capacity_;
  int num_sensors_;
  Vec tau_, c1_, c0_;
};

struct ContinuationCosts {
  double c0 = 0.0;
  double c1 = 0.0;
};

// C0(e) = E V_next(min{e + Z, B}),  C1(e) = c + E V_next(min{e - 1 + Z, B}).
// V_next must cover levels 0..B. e = 0 yields C1 = NaN.
ContinuationCosts continuation_costs(std::span<const double> next_values, int e,
                                     const HarvestPmf& harvest, double comm_cost);
double no_transmit_continuation(std::span<const double> next_values, int e,
                                const HarvestPmf& harvest);
// Throws DomainError for e = 0.
double transmit_continuation(std::span<const double> next_values, int e,
                             const HarvestPmf& harvest, double comm_cost);

struct DpOptions {
  int threads = 1;
  // Absolute tolerance (scaled by max(1, |C0|)) under which a negative
  // C1 - C0 is clamped to zero instead of raising ConsistencyError.
  double kappa_tol = 1e-9;
};

struct DpResult {
  ValueTable values;
  ThresholdTable thresholds;
};

struct GeneralDpResult {
  ValueTable values;
  GeneralThresholdTable thresholds;
};

// Unit weights and one shared communication cost; any N >= 2.
DpResult backward_induction(const Instance& instance, const QuadratureConfig& quad,
                            const DpOptions& options = {});
DpResult backward_induction(const Instance& instance, const StageExpectation& stage,
                            const DpOptions& options = {});

// Per-sensor weights and costs.
GeneralDpResult backward_induction_general(const Instance& instance,
                                           const QuadratureConfig& quad,
                                           const DpOptions& options = {});
GeneralDpResult backward_induction_general(const Instance& instance,
                                           const StageExpectation& stage,
                                           const DpOptions& options = {});

// V_1(initial_energy), dispatching to the general recursion when the
// instance has unequal weights or costs.
double optimal_cost(const Instance& instance, const StageExpectation& stage,
                    const DpOptions& options = {});

}  // namespace ehsched
