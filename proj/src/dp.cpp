#include "ehsched/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ehsched/parallel.hpp"

namespace ehsched {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double expected_next(std::span<const double> next_values, int level, const HarvestPmf& harvest) {
  const int cap = static_cast<int>(next_values.size()) - 1;
  const auto probs = harvest.probs();
  double acc = 0.0;
  for (std::size_t z = 0; z < probs.size(); ++z) {
    if (probs[z] == 0.0) continue;
    acc += probs[z] * next_values[std::min(level + static_cast<int>(z), cap)];
  }
  return acc;
}

void check_level(int e, int cap) {
  if (e < 0 || e > cap) {
    throw DomainError("battery level " + std::to_string(e) + " outside [0, " +
                      std::to_string(cap) + "]");
  }
}

double clamp_kappa(double kappa, double c0, const DpOptions& options, int t, int e) {
  const double tol = options.kappa_tol * std::max(1.0, std::abs(c0));
  if (kappa < -tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "C1 - C0 = " << kappa << " < 0 at t=" << t << ", e=" << e
        << ": value function is not non-increasing in energy";
    throw ConsistencyError(msg.str());
  }
  return std::max(kappa, 0.0);
}

}  // namespace

ValueTable::ValueTable(int horizon, int capacity)
    : horizon_(horizon),
      capacity_(capacity),
      values_(static_cast<std::size_t>(horizon + 1) * (capacity + 1), 0.0) {}

std::size_t ValueTable::index(int t, int e) const {
  return static_cast<std::size_t>(t - 1) * (capacity_ + 1) + e;
}

std::span<const double> ValueTable::row(int t) const {
  return std::span<const double>(values_).subspan(index(t, 0), capacity_ + 1);
}

ThresholdTable::ThresholdTable(int horizon, int capacity)
    : horizon_(horizon), capacity_(capacity) {
  const auto size = static_cast<std::size_t>(horizon) * (capacity + 1);
  tau_.assign(size, kNaN);
  c0_.assign(size, kNaN);
  c1_.assign(size, kNaN);
}

std::size_t ThresholdTable::index(int t, int e) const {
  return static_cast<std::size_t>(t - 1) * (capacity_ + 1) + e;
}

void ThresholdTable::set(int t, int e, double tau, double c0, double c1) {
  const auto k = index(t, e);
  tau_[k] = tau;
  c0_[k] = c0;
  c1_[k] = c1;
}

GeneralThresholdTable::GeneralThresholdTable(int horizon, int capacity, int num_sensors)
    : horizon_(horizon), capacity_(capacity), num_sensors_(num_sensors) {
  const auto cells = static_cast<std::size_t>(horizon) * (capacity + 1);
  tau_.assign(cells * num_sensors, kNaN);
  c1_.assign(cells * num_sensors, kNaN);
  c0_.assign(cells, kNaN);
}

std::size_t GeneralThresholdTable::index(int t, int e, int i) const {
  return (static_cast<std::size_t>(t - 1) * (capacity_ + 1) + e) * num_sensors_ + (i - 1);
}

double GeneralThresholdTable::c0(int t, int e) const {
  return c0_[static_cast<std::size_t>(t - 1) * (capacity_ + 1) + e];
}

void GeneralThresholdTable::set(int t, int e, double c0, std::span<const double> c1,
                                std::span<const double> tau) {
  c0_[static_cast<std::size_t>(t - 1) * (capacity_ + 1) + e] = c0;
  for (int i = 1; i <= num_sensors_; ++i) {
    c1_[index(t, e, i)] = c1[i - 1];
    tau_[index(t, e, i)] = tau[i - 1];
  }
}

double no_transmit_continuation(std::span<const double> next_values, int e,
                                const HarvestPmf& harvest) {
  check_level(e, static_cast<int>(next_values.size()) - 1);
  return expected_next(next_values, e, harvest);
}

double transmit_continuation(std::span<const double> next_values, int e,
                             const HarvestPmf& harvest, double comm_cost) {
  check_level(e, static_cast<int>(next_values.size()) - 1);
  if (e == 0) throw DomainError("no transmission is feasible with an empty battery");
  return comm_cost + expected_next(next_values, e - 1, harvest);
}

ContinuationCosts continuation_costs(std::span<const double> next_values, int e,
                                     const HarvestPmf& harvest, double comm_cost) {
  ContinuationCosts out;
  out.c0 = no_transmit_continuation(next_values, e, harvest);
  out.c1 = e == 0 ? kNaN : transmit_continuation(next_values, e, harvest, comm_cost);
  return out;
}

DpResult backward_induction(const Instance& instance, const QuadratureConfig& quad,
                            const DpOptions& options) {
  const StageExpectation stage(instance.sources(), quad);
  return backward_induction(instance, stage, options);
}

DpResult backward_induction(const Instance& instance, const StageExpectation& stage,
                            const DpOptions& options) {
  if (!instance.is_uniform()) {
    throw DomainError(
        "backward_induction needs unit weights and a shared communication cost; "
        "use backward_induction_general");
  }
  const int horizon = instance.horizon();
  const int cap = instance.capacity();
  const double comm = instance.comm_cost(0);
  const auto& harvest = instance.harvest();
  const auto means = stage.means();
  double mean_sum = 0.0;
  for (double m : means) mean_sum += m;

  DpResult out{ValueTable(horizon, cap), ThresholdTable(horizon, cap)};
  for (int t = horizon; t >= 1; --t) {
    const Vec next(out.values.row(t + 1).begin(), out.values.row(t + 1).end());
    const double c0_empty = expected_next(next, 0, harvest);
    out.values.at(t, 0) = mean_sum + c0_empty;
    out.thresholds.set(t, 0, kNaN, c0_empty, kNaN);
    parallel_for(1, cap + 1, options.threads, [&](int e) {
      const auto cc = continuation_costs(next, e, harvest, comm);
      const double kappa = clamp_kappa(cc.c1 - cc.c0, cc.c0, options, t, e);
      out.thresholds.set(t, e, std::sqrt(kappa), cc.c0, cc.c1);
      out.values.at(t, e) = cc.c0 + stage.expected_min_stage(kappa);
    });
  }
  return out;
}

GeneralDpResult backward_induction_general(const Instance& instance,
                                           const QuadratureConfig& quad,
                                           const DpOptions& options) {
  const StageExpectation stage(instance.sources(), quad);
  return backward_induction_general(instance, stage, options);
}

GeneralDpResult backward_induction_general(const Instance& instance,
                                           const StageExpectation& stage,
                                           const DpOptions& options) {
  const int horizon = instance.horizon();
  const int cap = instance.capacity();
  const int n = instance.num_sensors();
  const auto& harvest = instance.harvest();
  const auto& weights = instance.weights();
  const double weighted_mean = stage.weighted_mean_sum(weights);

  GeneralDpResult out{ValueTable(horizon, cap), GeneralThresholdTable(horizon, cap, n)};
  const Vec nan_row(n, kNaN);
  for (int t = horizon; t >= 1; --t) {
    const Vec next(out.values.row(t + 1).begin(), out.values.row(t + 1).end());
    const double c0_empty = expected_next(next, 0, harvest);
    out.values.at(t, 0) = weighted_mean + c0_empty;
    out.thresholds.set(t, 0, c0_empty, nan_row, nan_row);
    parallel_for(1, cap + 1, options.threads, [&](int e) {
      const double c0 = no_transmit_continuation(next, e, harvest);
      const double spent = expected_next(next, e - 1, harvest);
      Vec c1(n), tau(n);
      for (int i = 0; i < n; ++i) {
        c1[i] = instance.comm_cost(i) + spent;
        tau[i] = clamp_kappa(c1[i] - c0, c0, options, t, e);
      }
      out.thresholds.set(t, e, c0, c1, tau);
      out.values.at(t, e) = c0 + stage.expected_min_stage(weights, tau);
    });
  }
  return out;
}

double optimal_cost(const Instance& instance, const StageExpectation& stage,
                    const DpOptions& options) {
  if (instance.is_uniform()) {
    return backward_induction(instance, stage, options).values.at(1, instance.initial_energy());
  }
  return backward_induction_general(instance, stage, options)
      .values.at(1, instance.initial_energy());
}

}  // namespace ehsched
