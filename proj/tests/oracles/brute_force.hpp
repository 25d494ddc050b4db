#pragma once

// Exhaustive search over the discrete outcome tree of a small instance with
// scalar discrete sources. Every node (history of realizations, battery
// level) tries every feasible action, which covers every history-dependent
// scheduling rule. Estimators output the realized value when it is received
// and `prescription[i]` otherwise. No dynamic-programming structure of the
// production code is reused.

#include <algorithm>
#include <limits>
#include <vector>

#include "common.hpp"

namespace ehsched::testing {

struct TreeProblem {
  std::vector<ScalarLaw> laws;
  std::vector<double> prescription;  // estimate used on the empty symbol
  std::vector<double> comm_costs;
  std::vector<double> harvest;  // pmf over z = 0..
  int capacity = 1;
  int horizon = 1;
};

inline double tree_value(const TreeProblem& p, int t, int e) {
  if (t > p.horizon) return 0.0;
  const int n = static_cast<int>(p.laws.size());
  std::vector<int> idx(n, 0);
  double total = 0.0;
  // Odometer over the joint outcome grid.
  while (true) {
    double prob = 1.0;
    for (int i = 0; i < n; ++i) prob *= p.laws[i].p[idx[i]];
    double best = std::numeric_limits<double>::infinity();
    const int max_u = e > 0 ? n : 0;
    for (int u = 0; u <= max_u; ++u) {
      double cost = u > 0 ? p.comm_costs[u - 1] : 0.0;
      for (int i = 0; i < n; ++i) {
        if (u == i + 1) continue;
        const double d = p.laws[i].x[idx[i]] - p.prescription[i];
        cost += d * d;
      }
      for (std::size_t z = 0; z < p.harvest.size(); ++z) {
        if (p.harvest[z] == 0.0) continue;
        const int next = std::min(e - (u > 0 ? 1 : 0) + static_cast<int>(z), p.capacity);
        cost += p.harvest[z] * tree_value(p, t + 1, next);
      }
      best = std::min(best, cost);
    }
    total += prob * best;
    int k = 0;
    while (k < n && ++idx[k] == static_cast<int>(p.laws[k].x.size())) idx[k++] = 0;
    if (k == n) break;
  }
  return total;
}

}  // namespace ehsched::testing
