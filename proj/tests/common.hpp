#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "ehsched/model.hpp"

namespace ehsched::testing {

inline SourceSpec standard_gaussian() { return SourceSpec::gaussian_isotropic({0.0}, 1.0); }

inline HarvestPmf harvest_p1() { return HarvestPmf({{0, 0.85}, {1, 0.1}, {2, 0.05}}); }
inline HarvestPmf harvest_p2() { return HarvestPmf({{0, 0.7}, {1, 0.2}, {2, 0.1}}); }

inline Instance gaussian_pair(int horizon, int capacity, double comm_cost = 0.0,
                              HarvestPmf harvest = HarvestPmf::none()) {
  InstanceParams p;
  p.sources = {standard_gaussian(), standard_gaussian()};
  p.horizon = horizon;
  p.capacity = capacity;
  p.comm_costs = {comm_cost};
  p.harvest = std::move(harvest);
  return Instance(std::move(p));
}

// Symmetric unimodal lattice law: x_k = spacing (k - points/2), weights
// proportional to exp(-x^2 / 2).
struct ScalarLaw {
  std::vector<double> x;
  std::vector<double> p;
};

inline ScalarLaw lattice_gaussian_law(int points, double spacing) {
  ScalarLaw law;
  double total = 0.0;
  const int half = points / 2;
  for (int k = 0; k < points; ++k) {
    const double x = spacing * (k - half);
    law.x.push_back(x);
    law.p.push_back(std::exp(-0.5 * x * x));
    total += law.p.back();
  }
  for (double& p : law.p) p /= total;
  return law;
}

inline ScalarLaw nine_point_law(double scale = 0.75) { return lattice_gaussian_law(9, scale); }

// The same law expressed through S = x^2 (duplicates are merged by the
// source).
inline SourceSpec radial_source(const ScalarLaw& law) {
  std::vector<double> nodes;
  for (double x : law.x) nodes.push_back(x * x);
  return SourceSpec::custom_radial({0.0}, nodes, law.p);
}

}  // namespace ehsched::testing
