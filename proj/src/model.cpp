#include "ehsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

namespace ehsched {

namespace detail {

class RadialLaw {
 public:
  virtual ~RadialLaw() = default;
  virtual double mean() const = 0;
  virtual double cdf(double s) const = 0;
  virtual double survival(double s) const = 0;
  virtual double sample(Rng& rng) const = 0;
  virtual std::span<const double> atoms() const { return {}; }
  virtual std::span<const double> weights() const { return {}; }
};

namespace {

// sigma2 * chi-square with n degrees of freedom.
class ScaledChiSquare final : public RadialLaw {
 public:
  ScaledChiSquare(int dof, double sigma2) : dof_(dof), sigma2_(sigma2) {}

  double mean() const override { return dof_ * sigma2_; }
  double cdf(double s) const override {
    if (s <= 0.0) return 0.0;
    return boost::math::gamma_p(0.5 * dof_, s / (2.0 * sigma2_));
  }
  double survival(double s) const override {
    if (s <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof_, s / (2.0 * sigma2_));
  }
  double sample(Rng& rng) const override {
    std::normal_distribution<double> normal;
    double acc = 0.0;
    for (int k = 0; k < dof_; ++k) {
      const double g = normal(rng);
      acc += g * g;
    }
    return sigma2_ * acc;
  }

 private:
  int dof_;
  double sigma2_;
};

// sum_j lambda_j Z_j^2 with distinct positive lambda_j, written as a mixture
// of scaled chi-squares sum_k c_k * beta * chi2(n + 2k) with beta = min lambda.
class WeightedChiSquare final : public RadialLaw {
 public:
  explicit WeightedChiSquare(Vec lambdas) : lambdas_(std::move(lambdas)) {
    const int n = static_cast<int>(lambdas_.size());
    dof_ = n;
    beta_ = *std::min_element(lambdas_.begin(), lambdas_.end());
    Vec gammas(n);
    double c0 = 1.0;
    for (int j = 0; j < n; ++j) {
      gammas[j] = 1.0 - beta_ / lambdas_[j];
      c0 *= std::sqrt(beta_ / lambdas_[j]);
    }
    constexpr int kMaxTerms = 20000;
    constexpr double kMassTol = 1e-15;
    coeffs_.push_back(c0);
    Vec g;  // g[k-1] = 0.5 * sum_j gamma_j^k
    Vec powers(n, 1.0);
    double mass = c0;
    for (int k = 1; mass < 1.0 - kMassTol; ++k) {
      if (k > kMaxTerms) {
        throw ConfigError(
            "gaussian-diagonal: variance ratio too large for the mixture "
            "expansion of ||X - a||^2");
      }
      double gk = 0.0;
      for (int j = 0; j < n; ++j) {
        powers[j] *= gammas[j];
        gk += powers[j];
      }
      g.push_back(0.5 * gk);
      double ck = 0.0;
      for (int r = 0; r < k; ++r) ck += g[k - r - 1] * coeffs_[r];
      ck /= k;
      coeffs_.push_back(ck);
      mass += ck;
    }
  }

  double mean() const override {
    return std::accumulate(lambdas_.begin(), lambdas_.end(), 0.0);
  }
  double cdf(double s) const override {
    if (s <= 0.0) return 0.0;
    const double y = s / (2.0 * beta_);
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      acc += coeffs_[k] * boost::math::gamma_p(0.5 * dof_ + k, y);
    }
    return std::min(acc, 1.0);
  }
  double survival(double s) const override {
    if (s <= 0.0) return 1.0;
    const double y = s / (2.0 * beta_);
    // The truncated mixture mass (< 1e-15) is dropped so the tail decays.
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      acc += coeffs_[k] * boost::math::gamma_q(0.5 * dof_ + k, y);
    }
    return std::min(acc, 1.0);
  }
  double sample(Rng& rng) const override {
    std::normal_distribution<double> normal;
    double acc = 0.0;
    for (double lambda : lambdas_) {
      const double g = normal(rng);
      acc += lambda * g * g;
    }
    return acc;
  }

 private:
  Vec lambdas_;
  int dof_ = 0;
  double beta_ = 1.0;
  Vec coeffs_;
};

class DiscreteRadial final : public RadialLaw {
 public:
  DiscreteRadial(Vec nodes, Vec weights, RadialSampler sampler) {
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return nodes[a] < nodes[b]; });
    // Merge duplicate nodes so atoms are strictly increasing.
    for (auto k : order) {
      if (!atoms_.empty() && atoms_.back() == nodes[k]) {
        weights_.back() += weights[k];
      } else {
        atoms_.push_back(nodes[k]);
        weights_.push_back(weights[k]);
      }
    }
    cumulative_.resize(atoms_.size());
    std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
    tail_.resize(atoms_.size());
    double acc = 0.0;
    for (std::size_t k = atoms_.size(); k-- > 0;) {
      tail_[k] = acc;  // mass strictly above atoms_[k]
      acc += weights_[k];
    }
    mean_ = std::inner_product(atoms_.begin(), atoms_.end(), weights_.begin(), 0.0);
    sampler_ = sampler ? std::move(sampler) : RadialSampler{};
  }

  double mean() const override { return mean_; }
  double cdf(double s) const override {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), s);
    if (it == atoms_.begin()) return 0.0;
    return cumulative_[std::distance(atoms_.begin(), it) - 1];
  }
  double survival(double s) const override {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), s);
    if (it == atoms_.begin()) return 1.0;
    return tail_[std::distance(atoms_.begin(), it) - 1];
  }
  double sample(Rng& rng) const override {
    if (sampler_) return sampler_(rng);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return atoms_[std::distance(cumulative_.begin(), it)];
  }
  std::span<const double> atoms() const override { return atoms_; }
  std::span<const double> weights() const override { return weights_; }

 private:
  Vec atoms_;
  Vec weights_;
  Vec cumulative_;
  Vec tail_;
  double mean_ = 0.0;
  RadialSampler sampler_;
};

void require_center(const Vec& center) {
  if (center.empty()) throw ConfigError("source dimension must be positive");
  for (double v : center) {
    if (!std::isfinite(v)) throw ConfigError("source center must be finite");
  }
}

}  // namespace
}  // namespace detail

std::string to_string(SourceFamily family) {
  switch (family) {
    case SourceFamily::GaussianIsotropic: return "gaussian-isotropic";
    case SourceFamily::GaussianDiagonal: return "gaussian-diagonal";
    case SourceFamily::CustomRadial: return "custom-radial";
  }
  return "unknown";
}

SourceSpec::SourceSpec(SourceFamily family, Vec center, Vec variances,
                       std::shared_ptr<const detail::RadialLaw> law)
    : family_(family),
      center_(std::move(center)),
      variances_(std::move(variances)),
      law_(std::move(law)) {}

SourceSpec SourceSpec::gaussian_isotropic(Vec center, double sigma2) {
  detail::require_center(center);
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ConfigError("gaussian-isotropic: sigma2 must be > 0");
  }
  const int n = static_cast<int>(center.size());
  return SourceSpec(SourceFamily::GaussianIsotropic, std::move(center), {sigma2},
                    std::make_shared<detail::ScaledChiSquare>(n, sigma2));
}

SourceSpec SourceSpec::gaussian_diagonal(Vec center, Vec variances) {
  detail::require_center(center);
  if (variances.size() != center.size()) {
    throw ConfigError("gaussian-diagonal: variances must match the dimension");
  }
  for (double v : variances) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("gaussian-diagonal: every variance must be > 0");
    }
  }
  const int n = static_cast<int>(center.size());
  std::shared_ptr<const detail::RadialLaw> law;
  if (std::all_of(variances.begin(), variances.end(),
                  [&](double v) { return v == variances.front(); })) {
    law = std::make_shared<detail::ScaledChiSquare>(n, variances.front());
  } else {
    law = std::make_shared<detail::WeightedChiSquare>(variances);
  }
  return SourceSpec(SourceFamily::GaussianDiagonal, std::move(center),
                    std::move(variances), std::move(law));
}

SourceSpec SourceSpec::custom_radial(Vec center, Vec nodes, Vec weights,
                                     RadialSampler sampler) {
  detail::require_center(center);
  if (nodes.empty() || nodes.size() != weights.size()) {
    throw ConfigError("custom-radial: nodes and weights must be nonempty and equal length");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (!(nodes[k] >= 0.0) || !std::isfinite(nodes[k])) {
      throw ConfigError("custom-radial: nodes must be finite and >= 0");
    }
    if (!(weights[k] >= 0.0)) {
      throw ConfigError("custom-radial: weights must be nonnegative");
    }
    total += weights[k];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "custom-radial: weights must sum to 1 (got " << total << ")";
    throw ConfigError(msg.str());
  }
  return SourceSpec(SourceFamily::CustomRadial, std::move(center), {},
                    std::make_shared<detail::DiscreteRadial>(
                        std::move(nodes), std::move(weights), std::move(sampler)));
}

double SourceSpec::second_moment() const { return law_->mean(); }
double SourceSpec::cdf(double s) const { return law_->cdf(s); }
double SourceSpec::survival(double s) const { return law_->survival(s); }
std::span<const double> SourceSpec::atoms() const { return law_->atoms(); }
std::span<const double> SourceSpec::atom_weights() const { return law_->weights(); }

double SourceSpec::upper_bound(double eps) const {
  if (is_discrete()) return atoms().back();
  double hi = std::max(1.0, second_moment());
  for (int it = 0; survival(hi) > eps; ++it) {
    if (it > 1100) throw DomainError("source tail does not decay");
    hi *= 2.0;
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (survival(mid) > eps ? lo : hi) = mid;
  }
  return hi;
}

double SourceSpec::sample_radial(Rng& rng) const { return law_->sample(rng); }

Vec SourceSpec::sample(Rng& rng) const {
  Vec x = center_;
  std::normal_distribution<double> normal;
  switch (family_) {
    case SourceFamily::GaussianIsotropic: {
      const double sd = std::sqrt(variances_.front());
      for (double& v : x) v += sd * normal(rng);
      break;
    }
    case SourceFamily::GaussianDiagonal:
      for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] += std::sqrt(variances_[k]) * normal(rng);
      }
      break;
    case SourceFamily::CustomRadial: {
      // Uniform direction scaled by a radius drawn from the radial law.
      const double radius = std::sqrt(law_->sample(rng));
      Vec dir(x.size());
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (double& d : dir) {
          d = normal(rng);
          norm2 += d * d;
        }
      } while (norm2 == 0.0);
      const double scale = radius / std::sqrt(norm2);
      for (std::size_t k = 0; k < x.size(); ++k) x[k] += scale * dir[k];
      break;
    }
  }
  return x;
}

double second_moment(const SourceSpec& source) { return source.second_moment(); }

HarvestPmf::HarvestPmf() : probs_{1.0} {}

HarvestPmf::HarvestPmf(const std::map<int, double>& probs) {
  if (probs.empty()) throw ConfigError("harvest pmf must not be empty");
  int max_z = 0;
  double total = 0.0;
  for (auto [z, p] : probs) {
    if (z < 0) throw ConfigError("harvest support must be nonnegative integers");
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("harvest probabilities must lie in [0, 1]");
    }
    if (p > 0.0) max_z = std::max(max_z, z);
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "harvest probabilities must sum to 1 (got " << total << ")";
    throw ConfigError(msg.str());
  }
  probs_.assign(max_z + 1, 0.0);
  for (auto [z, p] : probs) {
    if (z <= max_z) probs_[z] = p;
  }
}

double HarvestPmf::prob(int z) const {
  if (z < 0 || z > max_support()) return 0.0;
  return probs_[z];
}

double HarvestPmf::mean() const {
  double acc = 0.0;
  for (std::size_t z = 0; z < probs_.size(); ++z) acc += z * probs_[z];
  return acc;
}

Instance::Instance(InstanceParams params)
    : sources_(std::move(params.sources)),
      capacity_(params.capacity),
      horizon_(params.horizon),
      harvest_(std::move(params.harvest)) {
  const int n = static_cast<int>(sources_.size());
  if (n < 2) throw ConfigError("an instance needs at least two sensors");
  if (capacity_ < 1) throw ConfigError("capacity must be >= 1");
  if (horizon_ < 1) throw ConfigError("horizon must be >= 1");
  if (params.comm_costs.size() == 1) {
    comm_costs_.assign(n, params.comm_costs.front());
  } else if (static_cast<int>(params.comm_costs.size()) == n) {
    comm_costs_ = std::move(params.comm_costs);
  } else {
    throw ConfigError("comm_costs must have one entry or one per sensor");
  }
  for (double c : comm_costs_) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ConfigError("communication costs must be >= 0");
  }
  if (params.weights.empty()) {
    weights_.assign(n, 1.0);
  } else if (static_cast<int>(params.weights.size()) == n) {
    weights_ = std::move(params.weights);
  } else {
    throw ConfigError("weights must have one entry per sensor");
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("weights must be > 0");
  }
  initial_energy_ = params.initial_energy.value_or(capacity_);
  if (initial_energy_ < 0 || initial_energy_ > capacity_) {
    throw ConfigError("initial_energy must lie in [0, capacity]");
  }
}

Vec Instance::second_moments() const {
  Vec m;
  m.reserve(sources_.size());
  for (const auto& s : sources_) m.push_back(s.second_moment());
  return m;
}

bool Instance::is_uniform() const {
  return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 1.0; }) &&
         std::all_of(comm_costs_.begin(), comm_costs_.end(),
                     [&](double c) { return c == comm_costs_.front(); });
}

std::vector<std::string> Instance::warnings() const {
  std::vector<std::string> out;
  if (capacity_ >= horizon_) {
    out.push_back("capacity (" + std::to_string(capacity_) + ") >= horizon (" +
                  std::to_string(horizon_) + "): the battery can never bind without harvesting");
  }
  return out;
}

Instance Instance::with_capacity(int capacity) const {
  Instance copy = *this;
  if (capacity < 1) throw ConfigError("capacity must be >= 1");
  copy.capacity_ = capacity;
  copy.initial_energy_ = capacity;
  return copy;
}

Instance Instance::with_horizon(int horizon) const {
  Instance copy = *this;
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  copy.horizon_ = horizon;
  return copy;
}

Instance Instance::with_harvest(HarvestPmf harvest) const {
  Instance copy = *this;
  copy.harvest_ = std::move(harvest);
  return copy;
}

std::vector<int> feasible_actions(int e, int capacity, int num_sensors) {
  if (e < 0 || e > capacity) {
    throw DomainError("battery level " + std::to_string(e) + " outside [0, " +
                      std::to_string(capacity) + "]");
  }
  if (e == 0) return {0};
  std::vector<int> actions(num_sensors + 1);
  std::iota(actions.begin(), actions.end(), 0);
  return actions;
}

bool is_feasible(int u, int e, int num_sensors) {
  if (u < 0 || u > num_sensors) return false;
  return u == 0 || e > 0;
}

int battery_step(int e, int u, int z, int capacity) {
  if (e < 0 || e > capacity) throw DomainError("battery level outside [0, B]");
  if (z < 0) throw DomainError("harvested energy must be >= 0");
  if (u < 0) throw ContractViolation("negative action");
  if (u != 0 && e == 0) throw ContractViolation("transmission scheduled with an empty battery");
  return std::min(e - (u != 0 ? 1 : 0) + z, capacity);
}

std::optional<Vec> channel_output(const Vec& x_i, int u, int i) {
  if (u == i) return x_i;
  return std::nullopt;
}

double squared_distance(std::span<const double> x, std::span<const double> a) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - a[k];
    acc += d * d;
  }
  return acc;
}

}  // namespace ehsched
