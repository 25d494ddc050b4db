#include "ehsched/blind.hpp"

#include <algorithm>
#include <numeric>

#include "ehsched/policy.hpp"

namespace ehsched {

EnergyDistribution::EnergyDistribution(int horizon, int capacity)
    : horizon_(horizon),
      capacity_(capacity),
      pmf_(static_cast<std::size_t>(horizon) * (capacity + 1), 0.0) {}

std::span<const double> EnergyDistribution::row(int t) const {
  return std::span<const double>(pmf_).subspan(index(t, 0), capacity_ + 1);
}

EnergyDistribution energy_chain(const Instance& instance) {
  const int horizon = instance.horizon();
  const int cap = instance.capacity();
  const auto probs = instance.harvest().probs();
  EnergyDistribution dist(horizon, cap);
  dist.prob(1, instance.initial_energy()) = 1.0;
  for (int t = 1; t < horizon; ++t) {
    for (int e = 0; e <= cap; ++e) {
      const double p = dist.prob(t, e);
      if (p == 0.0) continue;
      const int u = e > 0 ? 1 : 0;
      for (std::size_t z = 0; z < probs.size(); ++z) {
        if (probs[z] == 0.0) continue;
        dist.prob(t + 1, battery_step(e, u, static_cast<int>(z), cap)) += p * probs[z];
      }
    }
  }
  return dist;
}

namespace {

struct BlindTerms {
  double silent = 0.0;    // cost of a step with an empty battery
  double transmit = 0.0;  // cost of a step where the blind choice transmits
  double comm = 0.0;
};

BlindTerms blind_terms(const Instance& instance) {
  const Vec m = instance.second_moments();
  const auto& w = instance.weights();
  Vec weighted(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) weighted[i] = w[i] * m[i];
  const int chosen = blind_schedule(1, m).u - 1;
  BlindTerms terms;
  terms.silent = std::accumulate(weighted.begin(), weighted.end(), 0.0);
  terms.transmit = terms.silent - weighted[chosen];
  terms.comm = instance.comm_cost(chosen);
  return terms;
}

}  // namespace

double blind_cost(const Instance& instance) {
  const auto dist = energy_chain(instance);
  const auto terms = blind_terms(instance);
  double total = 0.0;
  for (int t = 1; t <= instance.horizon(); ++t) {
    const double p0 = dist.empty_prob(t);
    total += p0 * terms.silent + (1.0 - p0) * terms.transmit;
  }
  return total;
}

double blind_cost_with_comm(const Instance& instance) {
  const auto dist = energy_chain(instance);
  const auto terms = blind_terms(instance);
  double total = 0.0;
  for (int t = 1; t <= instance.horizon(); ++t) {
    const double p0 = dist.empty_prob(t);
    total += p0 * terms.silent + (1.0 - p0) * (terms.transmit + terms.comm);
  }
  return total;
}

}  // namespace ehsched
