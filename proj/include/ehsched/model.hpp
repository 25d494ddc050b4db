#pragma once

// Problem instance: sensor sources, energy-harvesting battery, unicast
// channel and cost parameters, plus the primitive dynamics.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ehsched/errors.hpp"

namespace ehsched {

using Rng = std::mt19937_64;
using Vec = std::vector<double>;

enum class SourceFamily { GaussianIsotropic, GaussianDiagonal, CustomRadial };

std::string to_string(SourceFamily family);

// Draws one realization of S = ||X - a||^2.
using RadialSampler = std::function<double(Rng&)>;

namespace detail {
class RadialLaw;
}

// One sensor's source distribution, described through the law of the
// squared deviation S = ||X - a||^2 from its center a. Every expectation
// the optimizer needs depends on X only through S.
//
// The threshold policy is only guaranteed optimal when the density of X is
// symmetric and unimodal around the center. For custom-radial sources that
// property cannot be checked from the law of S; it is the caller's
// obligation.
class SourceSpec {
 public:
  static SourceSpec gaussian_isotropic(Vec center, double sigma2);
  static SourceSpec gaussian_diagonal(Vec center, Vec variances);
  // nodes/weights describe a discrete law for S. When no sampler is given,
  // S is sampled from the atoms.
  static SourceSpec custom_radial(Vec center, Vec nodes, Vec weights,
                                  RadialSampler sampler = {});

  int dim() const { return static_cast<int>(center_.size()); }
  const Vec& center() const { return center_; }
  SourceFamily family() const { return family_; }
  // Isotropic: sigma^2; diagonal: per-coordinate variances; custom: empty.
  const Vec& variances() const { return variances_; }

  // E||X - a||^2.
  double second_moment() const;
  // P(S <= s) and P(S > s).
  double cdf(double s) const;
  double survival(double s) const;
  // Smallest s found with P(S > s) <= eps (max atom for discrete laws).
  double upper_bound(double eps) const;
  // Support points of a discrete law; empty for continuous laws.
  std::span<const double> atoms() const;
  std::span<const double> atom_weights() const;
  bool is_discrete() const { return !atoms().empty(); }

  double sample_radial(Rng& rng) const;
  Vec sample(Rng& rng) const;

 private:
  SourceSpec(SourceFamily family, Vec center, Vec variances,
             std::shared_ptr<const detail::RadialLaw> law);

  SourceFamily family_;
  Vec center_;
  Vec variances_;
  std::shared_ptr<const detail::RadialLaw> law_;
};

double second_moment(const SourceSpec& source);

// Probability mass function of the per-slot harvested energy Z on a finite
// set of nonnegative integers.
class HarvestPmf {
 public:
  HarvestPmf();  // Z = 0 with probability one
  explicit HarvestPmf(const std::map<int, double>& probs);

  double prob(int z) const;
  int max_support() const { return static_cast<int>(probs_.size()) - 1; }
  std::span<const double> probs() const { return probs_; }
  double mean() const;

  static HarvestPmf none() { return HarvestPmf(); }

 private:
  std::vector<double> probs_;  // indexed by z = 0..max_support
};

struct InstanceParams {
  std::vector<SourceSpec> sources;
  int capacity = 1;
  int horizon = 1;
  // Either one shared cost or one per sensor.
  std::vector<double> comm_costs{0.0};
  std::vector<double> weights;  // empty => all ones
  HarvestPmf harvest;
  std::optional<int> initial_energy;  // default: capacity
};

class Instance {
 public:
  explicit Instance(InstanceParams params);

  int num_sensors() const { return static_cast<int>(sources_.size()); }
  const std::vector<SourceSpec>& sources() const { return sources_; }
  const SourceSpec& source(int i) const { return sources_.at(i); }
  int capacity() const { return capacity_; }
  int horizon() const { return horizon_; }
  const Vec& comm_costs() const { return comm_costs_; }
  double comm_cost(int i) const { return comm_costs_.at(i); }
  const Vec& weights() const { return weights_; }
  const HarvestPmf& harvest() const { return harvest_; }
  int initial_energy() const { return initial_energy_; }
  Vec second_moments() const;

  // Unit weights and one shared communication cost.
  bool is_uniform() const;
  // Human-readable notes about accepted-but-unusual settings (B >= T).
  std::vector<std::string> warnings() const;

  // Copy with a different capacity; initial energy is set to the new capacity.
  Instance with_capacity(int capacity) const;
  Instance with_horizon(int horizon) const;
  Instance with_harvest(HarvestPmf harvest) const;

 private:
  std::vector<SourceSpec> sources_;
  int capacity_;
  int horizon_;
  Vec comm_costs_;
  Vec weights_;
  HarvestPmf harvest_;
  int initial_energy_;
};

// Actions are 0 (stay silent) or i in 1..N (transmit sensor i).
std::vector<int> feasible_actions(int e, int capacity, int num_sensors);
bool is_feasible(int u, int e, int num_sensors);

// min{e - [u != 0] + z, B}.
int battery_step(int e, int u, int z, int capacity);

// Estimator i receives x_i only when sensor i is scheduled; std::nullopt is
// the empty symbol.
std::optional<Vec> channel_output(const Vec& x_i, int u, int i);

double squared_distance(std::span<const double> x, std::span<const double> a);

}  // namespace ehsched
