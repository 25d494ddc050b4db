#pragma once

// Closed-form performance of the blind policy via the forward battery
// distribution.

#include <span>
#include <vector>

#include "ehsched/model.hpp"

namespace ehsched {

// pmf of E_t over 0..B for t = 1..T under "transmit iff e > 0".
class EnergyDistribution {
 public:
  EnergyDistribution(int horizon, int capacity);

  int horizon() const { return horizon_; }
  int capacity() const { return capacity_; }
  double prob(int t, int e) const { return pmf_[index(t, e)]; }
  double& prob(int t, int e) { return pmf_[index(t, e)]; }
  double empty_prob(int t) const { return prob(t, 0); }
  std::span<const double> row(int t) const;

 private:
  std::size_t index(int t, int e) const {
    return static_cast<std::size_t>(t - 1) * (capacity_ + 1) + e;
  }

  int horizon_;
  int capacity_;
  std::vector<double> pmf_;
};

EnergyDistribution energy_chain(const Instance& instance);

// Sum over t of P(E_t=0) sum_i m_i + (1 - P(E_t=0)) min_i m_i, weighted by
// the instance's w_i. Communication cost is not included.
double blind_cost(const Instance& instance);
// Same, plus the communication cost of each blind transmission.
double blind_cost_with_comm(const Instance& instance);

}  // namespace ehsched
