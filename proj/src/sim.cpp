#include "ehsched/sim.hpp"

#include <cmath>
#include <memory>

#include "ehsched/parallel.hpp"

namespace ehsched {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int sample_harvest(const HarvestPmf& harvest, Rng& rng) {
  const auto probs = harvest.probs();
  if (probs.size() == 1) return 0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (std::size_t z = 0; z + 1 < probs.size(); ++z) {
    acc += probs[z];
    if (u < acc) return static_cast<int>(z);
  }
  return static_cast<int>(probs.size()) - 1;
}

// One slot: sample, decide, deliver, estimate, accrue cost, harvest.
template <class Record>
double simulate(const Instance& instance, const Scheduler& scheduler,
                const Estimator& estimator, std::uint64_t seed, Record&& record) {
  Rng rng(seed);
  const int n = instance.num_sensors();
  const int cap = instance.capacity();
  int e = instance.initial_energy();
  double total = 0.0;
  std::vector<Vec> x(n);
  std::vector<std::optional<Vec>> y(n);
  std::vector<Vec> xhat(n);
  for (int t = 1; t <= instance.horizon(); ++t) {
    for (int i = 0; i < n; ++i) x[i] = instance.source(i).sample(rng);
    const int u = scheduler(x, e, t).u;
    if (!is_feasible(u, e, n)) {
      throw ContractViolation("scheduler returned infeasible action " + std::to_string(u) +
                              " at t=" + std::to_string(t) + ", e=" + std::to_string(e));
    }
    double cost = u != 0 ? instance.comm_cost(u - 1) : 0.0;
    for (int i = 0; i < n; ++i) {
      y[i] = channel_output(x[i], u, i + 1);
      xhat[i] = estimator(i + 1, y[i]);
      cost += instance.weights()[i] * squared_distance(x[i], xhat[i]);
    }
    const int z = sample_harvest(instance.harvest(), rng);
    record(t, x, e, u, z, y, xhat, cost);
    total += cost;
    e = battery_step(e, u, z, cap);
  }
  return total;
}

}  // namespace

Policy make_optimal_policy(const Instance& instance, ThresholdTable thresholds) {
  if (thresholds.horizon() != instance.horizon() || thresholds.capacity() != instance.capacity()) {
    throw ConfigError("threshold table does not match the instance horizon/capacity");
  }
  auto table = std::make_shared<const ThresholdTable>(std::move(thresholds));
  std::vector<Vec> centers;
  for (const auto& s : instance.sources()) centers.push_back(s.center());
  Policy p;
  p.scheduler = [table, centers](std::span<const Vec> x, int e, int t) {
    return optimal_schedule(x, e, t, *table, centers);
  };
  p.estimator = [centers](int sensor, const std::optional<Vec>& y) {
    return optimal_estimate(y, centers[sensor - 1]);
  };
  return p;
}

Policy make_weighted_policy(const Instance& instance, GeneralThresholdTable thresholds) {
  if (instance.num_sensors() != 2) throw DomainError("weighted policy is defined for two sensors");
  if (thresholds.horizon() != instance.horizon() || thresholds.capacity() != instance.capacity()) {
    throw ConfigError("threshold table does not match the instance horizon/capacity");
  }
  auto table = std::make_shared<const GeneralThresholdTable>(std::move(thresholds));
  std::vector<Vec> centers;
  for (const auto& s : instance.sources()) centers.push_back(s.center());
  Vec weights = instance.weights();
  Policy p;
  p.scheduler = [table, centers, weights](std::span<const Vec> x, int e, int t) {
    return weighted_schedule(x, e, t, *table, weights, centers);
  };
  p.estimator = [centers](int sensor, const std::optional<Vec>& y) {
    return optimal_estimate(y, centers[sensor - 1]);
  };
  return p;
}

Policy make_blind_policy(const Instance& instance) {
  const Vec moments = instance.second_moments();
  std::vector<Vec> means;
  for (const auto& s : instance.sources()) means.push_back(s.center());
  Policy p;
  p.scheduler = [moments](std::span<const Vec>, int e, int) { return blind_schedule(e, moments); };
  p.estimator = [means](int sensor, const std::optional<Vec>& y) {
    return blind_estimate(y, means[sensor - 1]);
  };
  return p;
}

double EpisodeTrace::total_cost() const {
  double acc = 0.0;
  for (const auto& s : steps) acc += s.stage_cost;
  return acc;
}

std::uint64_t episode_seed(std::uint64_t base_seed, std::uint64_t episode) {
  return splitmix64(splitmix64(base_seed) + episode);
}

EpisodeTrace run_episode(const Instance& instance, const Scheduler& scheduler,
                         const Estimator& estimator, std::uint64_t seed) {
  EpisodeTrace trace;
  trace.steps.reserve(instance.horizon());
  simulate(instance, scheduler, estimator, seed,
           [&](int t, const std::vector<Vec>& x, int e, int u, int z,
               const std::vector<std::optional<Vec>>& y, const std::vector<Vec>& xhat,
               double cost) { trace.steps.push_back({t, x, e, u, z, y, xhat, cost}); });
  return trace;
}

double episode_cost(const Instance& instance, const Scheduler& scheduler,
                    const Estimator& estimator, std::uint64_t seed) {
  return simulate(instance, scheduler, estimator, seed, [](auto&&...) {});
}

CostEstimate monte_carlo_cost(const Instance& instance, const Scheduler& scheduler,
                              const Estimator& estimator, long n_episodes,
                              std::uint64_t base_seed, int threads) {
  if (n_episodes < 1) throw ConfigError("n_episodes must be >= 1");
  std::vector<double> costs(n_episodes);
  parallel_for(0, static_cast<int>(n_episodes), threads, [&](int k) {
    costs[k] = episode_cost(instance, scheduler, estimator, episode_seed(base_seed, k));
  });
  // Fixed-order reduction keeps the estimate independent of the worker count.
  double sum = 0.0;
  for (double c : costs) sum += c;
  CostEstimate est;
  est.n_episodes = n_episodes;
  est.seed = base_seed;
  est.mean = sum / static_cast<double>(n_episodes);
  if (n_episodes > 1) {
    double ss = 0.0;
    for (double c : costs) ss += (c - est.mean) * (c - est.mean);
    est.std_error = std::sqrt(ss / (n_episodes - 1.0) / n_episodes);
    est.std_error_defined = true;
  }
  return est;
}

CostEstimate monte_carlo_cost(const Instance& instance, const Policy& policy, long n_episodes,
                              std::uint64_t base_seed, int threads) {
  return monte_carlo_cost(instance, policy.scheduler, policy.estimator, n_episodes, base_seed,
                          threads);
}

namespace {

void write_vectors(std::ostream& out, const std::vector<Vec>& vs) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out << ';';
    for (std::size_t k = 0; k < vs[i].size(); ++k) {
      if (k) out << ' ';
      out << vs[i][k];
    }
  }
}

}  // namespace

void write_trace_csv(std::ostream& out, const EpisodeTrace& trace) {
  const auto old_precision = out.precision(17);
  out << "t,e,u,z,x,y,xhat,stage_cost\n";
  for (const auto& s : trace.steps) {
    out << s.t << ',' << s.e << ',' << s.u << ',' << s.z << ',';
    write_vectors(out, s.x);
    out << ',';
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      if (i) out << ';';
      if (!s.y[i]) {
        out << "empty";
        continue;
      }
      for (std::size_t k = 0; k < s.y[i]->size(); ++k) {
        if (k) out << ' ';
        out << (*s.y[i])[k];
      }
    }
    out << ',';
    write_vectors(out, s.xhat);
    out << ',' << s.stage_cost << '\n';
  }
  out.precision(old_precision);
}

}  // namespace ehsched
