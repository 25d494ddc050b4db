#include <doctest.h>

#include <cmath>
#include <sstream>

#include "common.hpp"
#include "ehsched/blind.hpp"
#include "ehsched/dp.hpp"
#include "ehsched/sim.hpp"

using namespace ehsched;
using namespace ehsched::testing;

namespace {

double residual(const Vec& x, const Vec& a) { return squared_distance(x, a); }

}  // namespace

TEST_CASE("empty battery without harvest forces silence") {
  InstanceParams p;
  p.sources = {standard_gaussian(), SourceSpec::gaussian_isotropic({1.0, -1.0}, 2.0)};
  p.horizon = 15;
  p.capacity = 3;
  p.initial_energy = 0;
  p.comm_costs = {0.4};
  const Instance inst(std::move(p));
  const auto dp = backward_induction(inst, QuadratureConfig{});
  const Policy policy = make_optimal_policy(inst, dp.thresholds);
  const auto trace = run_episode(inst, policy.scheduler, policy.estimator, 99);
  REQUIRE(trace.steps.size() == 15);
  double expected = 0.0;
  for (const auto& s : trace.steps) {
    CHECK(s.u == 0);
    CHECK(s.e == 0);
    CHECK(!s.y[0].has_value());
    CHECK(!s.y[1].has_value());
    expected += residual(s.x[0], inst.source(0).center()) + residual(s.x[1], inst.source(1).center());
  }
  CHECK(trace.total_cost() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("single stage with zero threshold transmits the largest deviation") {
  const Instance inst = gaussian_pair(1, 1, 0.0);
  const auto dp = backward_induction(inst, QuadratureConfig{});
  REQUIRE(dp.thresholds.tau(1, 1) == 0.0);
  const Policy policy = make_optimal_policy(inst, dp.thresholds);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto trace = run_episode(inst, policy.scheduler, policy.estimator, seed);
    const auto& s = trace.steps.at(0);
    const double d1 = std::abs(s.x[0][0]), d2 = std::abs(s.x[1][0]);
    CHECK(s.u == (d1 >= d2 ? 1 : 2));
    CHECK(s.stage_cost == doctest::Approx(std::min(d1, d2) * std::min(d1, d2)).epsilon(1e-14));
    CHECK(s.y[s.u - 1].has_value());
    CHECK(s.xhat[s.u - 1] == s.x[s.u - 1]);
  }
}

TEST_CASE("fixed seed replays bit for bit") {
  const Instance inst = gaussian_pair(30, 4, 0.1, harvest_p2());
  const auto dp = backward_induction(inst, QuadratureConfig{});
  const Policy policy = make_optimal_policy(inst, dp.thresholds);
  const auto a = run_episode(inst, policy.scheduler, policy.estimator, 123);
  const auto b = run_episode(inst, policy.scheduler, policy.estimator, 123);
  std::ostringstream sa, sb;
  write_trace_csv(sa, a);
  write_trace_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(a.total_cost() == episode_cost(inst, policy.scheduler, policy.estimator, 123));
  CHECK(sa.str().rfind("t,e,u,z,x,y,xhat,stage_cost\n", 0) == 0);
}

TEST_CASE("battery follows the simulated dynamics") {
  const Instance inst = gaussian_pair(50, 3, 0.0, harvest_p2());
  const Policy policy = make_blind_policy(inst);
  const auto trace = run_episode(inst, policy.scheduler, policy.estimator, 5);
  CHECK(trace.steps[0].e == 3);
  for (std::size_t k = 0; k + 1 < trace.steps.size(); ++k) {
    const auto& s = trace.steps[k];
    CHECK(trace.steps[k + 1].e == battery_step(s.e, s.u, s.z, 3));
  }
}

TEST_CASE("monte_carlo_cost bookkeeping") {
  const Instance inst = gaussian_pair(10, 2);
  const Policy policy = make_blind_policy(inst);
  const auto single = monte_carlo_cost(inst, policy, 1, 4);
  CHECK(single.n_episodes == 1);
  CHECK_FALSE(single.std_error_defined);
  CHECK(single.std_error == 0.0);
  CHECK(single.mean ==
        episode_cost(inst, policy.scheduler, policy.estimator, episode_seed(4, 0)));
  CHECK_THROWS_AS(monte_carlo_cost(inst, policy, 0, 4), ConfigError);

  const auto a = monte_carlo_cost(inst, policy, 5000, 77, 1);
  const auto b = monte_carlo_cost(inst, policy, 5000, 77, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.std_error_defined);
  CHECK(episode_seed(1, 0) != episode_seed(0, 1));
}

TEST_CASE("infeasible scheduler is a contract violation") {
  const Instance inst = gaussian_pair(5, 1);
  const Scheduler greedy = [](std::span<const Vec>, int, int) { return Decision{1}; };
  const Estimator center = [](int, const std::optional<Vec>& y) {
    return y ? *y : Vec{0.0};
  };
  CHECK_THROWS_AS(run_episode(inst, greedy, center, 0), ContractViolation);
  const Scheduler out_of_range = [](std::span<const Vec>, int, int) { return Decision{3}; };
  CHECK_THROWS_AS(run_episode(inst, out_of_range, center, 0), ContractViolation);
}

TEST_CASE("optimal policy simulation matches the value function") {
  struct Case {
    Instance inst;
    long episodes;
  };
  InstanceParams mixed;
  mixed.sources = {SourceSpec::gaussian_isotropic({0.5, 0.0}, 0.6),
                   SourceSpec::gaussian_diagonal({0.0}, {1.5})};
  mixed.horizon = 12;
  mixed.capacity = 3;
  mixed.comm_costs = {0.2};
  mixed.harvest = harvest_p1();
  const std::vector<Case> cases = {
      {gaussian_pair(20, 5), 40000},
      {gaussian_pair(20, 2, 0.3, harvest_p2()), 40000},
      {Instance(mixed), 40000},
  };
  for (const auto& c : cases) {
    const auto dp = backward_induction(c.inst, QuadratureConfig{});
    const auto est = monte_carlo_cost(c.inst, make_optimal_policy(c.inst, dp.thresholds),
                                      c.episodes, 2024);
    const double v = dp.values.at(1, c.inst.initial_energy());
    CAPTURE(v);
    CAPTURE(est.mean);
    CHECK(std::abs(est.mean - v) <= 3.0 * est.std_error);
    const auto blind = monte_carlo_cost(c.inst, make_blind_policy(c.inst), c.episodes, 2024);
    CHECK(est.mean <= blind.mean + 3.0 * std::hypot(est.std_error, blind.std_error));
  }
}

TEST_CASE("weighted policy simulation matches the general value function") {
  InstanceParams p;
  p.sources = {standard_gaussian(), SourceSpec::gaussian_isotropic({0.0}, 0.5)};
  p.horizon = 15;
  p.capacity = 4;
  p.weights = {2.0, 1.0};
  p.comm_costs = {0.1, 0.4};
  p.harvest = harvest_p1();
  const Instance inst(std::move(p));
  const auto dp = backward_induction_general(inst, QuadratureConfig{});
  const auto est = monte_carlo_cost(inst, make_weighted_policy(inst, dp.thresholds), 40000, 8);
  CHECK(std::abs(est.mean - dp.values.at(1, 4)) <= 3.0 * est.std_error);
}
