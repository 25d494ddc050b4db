#include "ehsched/stage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>

namespace ehsched {

namespace {

constexpr double kTailEps = 1e-17;
constexpr int kGradedLevels = 12;

using Rule = boost::math::quadrature::gauss<double, 20>;

template <class F>
double integrate_panel(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return Rule::integrate(f, a, b);
}

void sort_unique(Vec& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::string to_string(QuadScheme scheme) {
  return scheme == QuadScheme::Quadrature ? "quadrature" : "mc";
}

QuadScheme parse_quad_scheme(const std::string& name) {
  if (name == "quadrature" || name == "gauss-hermite-radial") return QuadScheme::Quadrature;
  if (name == "mc" || name == "monte-carlo") return QuadScheme::MonteCarlo;
  throw ConfigError("unknown quadrature scheme '" + name + "' (expected quadrature|mc)");
}

void QuadratureConfig::validate() const {
  if (nodes_per_dim < 8) throw ConfigError("nodes_per_dim must be >= 8");
  if (mc_samples < 1000) throw ConfigError("mc_samples must be >= 1000");
}

StageExpectation::StageExpectation(std::vector<SourceSpec> sources, QuadratureConfig quad)
    : sources_(std::move(sources)), quad_(quad) {
  quad_.validate();
  if (sources_.empty()) throw ConfigError("stage expectation needs at least one source");
  const std::size_t n = sources_.size();

  if (quad_.scheme == QuadScheme::Quadrature) {
    for (const auto& src : sources_) means_.push_back(src.second_moment());
    for (const auto& src : sources_) {
      Vec mesh{0.0};
      if (src.is_discrete()) {
        for (double s : src.atoms()) mesh.push_back(s);
      } else {
        const double upper = src.upper_bound(kTailEps);
        const double h = upper / quad_.nodes_per_dim;
        for (int k = 1; k <= quad_.nodes_per_dim; ++k) mesh.push_back(k * h);
        // Geometric grading towards the origin, where the cdf of S may
        // behave like a fractional power.
        double g = h;
        for (int k = 0; k < kGradedLevels; ++k) {
          g *= 0.1;
          mesh.push_back(g);
        }
      }
      sort_unique(mesh);
      law_edges_.push_back(std::move(mesh));
    }
    for (const auto& mesh : law_edges_) edges_.insert(edges_.end(), mesh.begin(), mesh.end());
    sort_unique(edges_);
    tail_from_edge_.assign(edges_.size(), 0.0);
    auto g = [this](double s) { return uniform_tail(s); };
    for (std::size_t p = edges_.size() - 1; p-- > 0;) {
      tail_from_edge_[p] = tail_from_edge_[p + 1] + integrate_panel(g, edges_[p], edges_[p + 1]);
    }
  } else {
    const auto count = static_cast<std::size_t>(quad_.mc_samples);
    samples_.resize(count * n);
    Rng rng(quad_.mc_seed);
    for (std::size_t k = 0; k < count; ++k) {
      for (std::size_t j = 0; j < n; ++j) samples_[k * n + j] = sources_[j].sample_radial(rng);
    }
    means_.assign(n, 0.0);
    sorted_max_.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      double mx = samples_[k * n];
      for (std::size_t j = 0; j < n; ++j) {
        means_[j] += samples_[k * n + j];
        mx = std::max(mx, samples_[k * n + j]);
      }
      sorted_max_[k] = mx;
    }
    for (double& m : means_) m /= static_cast<double>(count);
    std::sort(sorted_max_.begin(), sorted_max_.end());
    suffix_sum_.assign(count + 1, 0.0);
    for (std::size_t k = count; k-- > 0;) suffix_sum_[k] = suffix_sum_[k + 1] + sorted_max_[k];
  }
}

double StageExpectation::weighted_mean_sum(std::span<const double> weights) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < means_.size(); ++j) acc += weights[j] * means_[j];
  return acc;
}

double StageExpectation::joint_tail(std::span<const double> points) const {
  double tail = 0.0;
  for (std::size_t j = 0; j < sources_.size(); ++j) {
    tail += (1.0 - tail) * sources_[j].survival(points[j]);
  }
  return tail;
}

double StageExpectation::uniform_tail(double s) const {
  double tail = 0.0;
  for (const auto& src : sources_) tail += (1.0 - tail) * src.survival(s);
  return tail;
}

double StageExpectation::excess(double kappa) const {
  if (kappa < 0.0) return -kappa + excess(0.0);
  return quad_.scheme == QuadScheme::Quadrature ? quad_excess_uniform(kappa)
                                                : mc_excess_uniform(kappa);
}

double StageExpectation::excess(std::span<const double> weights,
                                std::span<const double> offsets) const {
  const double w = weights.front();
  const double off = offsets.front();
  const bool uniform =
      std::all_of(weights.begin(), weights.end(), [&](double v) { return v == w; }) &&
      std::all_of(offsets.begin(), offsets.end(), [&](double v) { return v == off; });
  if (uniform) return w * excess(off / w);
  return quad_.scheme == QuadScheme::Quadrature ? quad_excess_general(weights, offsets)
                                                : mc_excess_general(weights, offsets);
}

double StageExpectation::expected_min_stage(double kappa) const {
  return std::accumulate(means_.begin(), means_.end(), 0.0) - excess(kappa);
}

double StageExpectation::expected_min_stage(std::span<const double> weights,
                                            std::span<const double> offsets) const {
  return weighted_mean_sum(weights) - excess(weights, offsets);
}

double StageExpectation::quad_excess_uniform(double kappa) const {
  if (kappa >= edges_.back()) return 0.0;
  auto it = std::upper_bound(edges_.begin(), edges_.end(), kappa);
  const auto p = static_cast<std::size_t>(std::distance(edges_.begin(), it));
  auto g = [this](double s) { return uniform_tail(s); };
  return integrate_panel(g, kappa, edges_[p]) + tail_from_edge_[p];
}

double StageExpectation::quad_excess_general(std::span<const double> weights,
                                             std::span<const double> offsets) const {
  const std::size_t n = sources_.size();
  double top = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    top = std::max(top, weights[j] * law_edges_[j].back() - offsets[j]);
  }
  if (top <= 0.0) return 0.0;
  // Mesh in r: every per-source edge mapped through r = w s - offset.
  Vec mesh{0.0, top};
  for (std::size_t j = 0; j < n; ++j) {
    for (double s : law_edges_[j]) {
      const double r = weights[j] * s - offsets[j];
      if (r > 0.0 && r < top) mesh.push_back(r);
    }
  }
  sort_unique(mesh);
  Vec points(n);
  auto g = [&](double r) {
    for (std::size_t j = 0; j < n; ++j) points[j] = (r + offsets[j]) / weights[j];
    return joint_tail(points);
  };
  double acc = 0.0;
  for (std::size_t p = mesh.size() - 1; p-- > 0;) acc += integrate_panel(g, mesh[p], mesh[p + 1]);
  return acc;
}

double StageExpectation::mc_excess_uniform(double kappa) const {
  const auto count = sorted_max_.size();
  auto it = std::upper_bound(sorted_max_.begin(), sorted_max_.end(), kappa);
  const auto k = static_cast<std::size_t>(std::distance(sorted_max_.begin(), it));
  const double above = static_cast<double>(count - k);
  return (suffix_sum_[k] - above * kappa) / static_cast<double>(count);
}

double StageExpectation::mc_excess_general(std::span<const double> weights,
                                           std::span<const double> offsets) const {
  const std::size_t n = sources_.size();
  const std::size_t count = samples_.size() / n;
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      best = std::max(best, weights[j] * samples_[k * n + j] - offsets[j]);
    }
    acc += best;
  }
  return acc / static_cast<double>(count);
}

double StageExpectation::standard_error(double kappa) const {
  if (quad_.scheme == QuadScheme::Quadrature) return 0.0;
  const std::size_t n = sources_.size();
  const std::size_t count = samples_.size() / n;
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    double total = 0.0;
    double mx = samples_[k * n];
    for (std::size_t j = 0; j < n; ++j) {
      total += samples_[k * n + j];
      mx = std::max(mx, samples_[k * n + j]);
    }
    const double v = total - std::max(0.0, mx - kappa);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / count;
  const double var = std::max(0.0, (sum2 - count * mean * mean) / (count - 1.0));
  return std::sqrt(var / count);
}

double expected_min_stage(double kappa, const SourceSpec& first, const SourceSpec& second,
                          const QuadratureConfig& quad) {
  if (kappa < 0.0) throw DomainError("kappa must be >= 0");
  return StageExpectation({first, second}, quad).expected_min_stage(kappa);
}

}  // namespace ehsched
