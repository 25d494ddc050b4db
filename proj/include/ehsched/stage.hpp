#pragma once

// Single-stage expectations over the sensor sources.
//
// With prescriptions at the source centers, the stage term of the value
// recursion is
//
//   E[ min{ sum_j w_j S_j,  min_j (sum_{i != j} w_i S_i + offset_j) } ]
//     = sum_j w_j m_j - E[ (max_j (w_j S_j - offset_j))^+ ],
//
// where S_j = ||X^j - a^j||^2. The excess term is a genuine joint
// expectation over all sources. The deterministic scheme evaluates it as
// the tail integral of 1 - prod_j F_j on a composite Gauss-Legendre mesh;
// the Monte Carlo scheme averages over a fixed common-seed sample.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ehsched/model.hpp"

namespace ehsched {

enum class QuadScheme { Quadrature, MonteCarlo };

std::string to_string(QuadScheme scheme);
QuadScheme parse_quad_scheme(const std::string& name);

struct QuadratureConfig {
  QuadScheme scheme = QuadScheme::Quadrature;
  // Uniform panels per source axis (each panel carries a 20-point rule).
  int nodes_per_dim = 64;
  long mc_samples = 200000;
  std::uint64_t mc_seed = 0;

  void validate() const;
};

class StageExpectation {
 public:
  StageExpectation(std::vector<SourceSpec> sources, QuadratureConfig quad);

  int num_sources() const { return static_cast<int>(sources_.size()); }
  const QuadratureConfig& config() const { return quad_; }

  // E[S_j] under the evaluator's measure (exact moments for quadrature,
  // sample means for Monte Carlo).
  std::span<const double> means() const { return means_; }
  double weighted_mean_sum(std::span<const double> weights) const;

  // E[(max_j S_j - kappa)^+].
  double excess(double kappa) const;
  // E[(max_j (w_j S_j - offset_j))^+].
  double excess(std::span<const double> weights, std::span<const double> offsets) const;

  // E[min{sum_j S_j, sum_j S_j - max_j S_j + kappa}].
  double expected_min_stage(double kappa) const;
  double expected_min_stage(std::span<const double> weights,
                            std::span<const double> offsets) const;

  // Standard error of expected_min_stage(kappa) under Monte Carlo; 0 for
  // the deterministic scheme.
  double standard_error(double kappa) const;

 private:
  double quad_excess_uniform(double kappa) const;
  double quad_excess_general(std::span<const double> weights,
                             std::span<const double> offsets) const;
  double mc_excess_uniform(double kappa) const;
  double mc_excess_general(std::span<const double> weights,
                           std::span<const double> offsets) const;
  // 1 - prod_j F_j(s_j).
  double joint_tail(std::span<const double> points) const;
  double uniform_tail(double s) const;

  std::vector<SourceSpec> sources_;
  QuadratureConfig quad_;
  Vec means_;

  // Deterministic scheme.
  std::vector<Vec> law_edges_;  // per-source mesh in s
  Vec edges_;                   // merged mesh for the uniform path
  Vec tail_from_edge_;          // integral of uniform_tail over [edges_[p], top]

  // Monte Carlo scheme.
  Vec samples_;        // row-major mc_samples x N
  Vec sorted_max_;     // max_j S_j per sample, ascending
  Vec suffix_sum_;     // suffix_sum_[k] = sum_{q >= k} sorted_max_[q]
};

double expected_min_stage(double kappa, const SourceSpec& first, const SourceSpec& second,
                          const QuadratureConfig& quad);

}  // namespace ehsched
