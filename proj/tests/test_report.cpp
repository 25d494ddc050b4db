#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "common.hpp"
#include "ehsched/blind.hpp"
#include "ehsched/report.hpp"

using namespace ehsched;
using namespace ehsched::testing;

TEST_CASE("threshold surface") {
  const auto surface = threshold_surface(gaussian_pair(12, 1), QuadratureConfig{});
  REQUIRE(surface.size() == 12);
  for (const auto& pt : surface) {
    CHECK(pt.e == 1);
    CHECK(std::isfinite(pt.tau));
    CHECK(pt.tau >= 0.0);
  }

  const auto base = threshold_surface(gaussian_pair(40, 12), QuadratureConfig{});
  const auto harvested = threshold_surface(gaussian_pair(40, 12, 0.0, harvest_p1()), QuadratureConfig{});
  REQUIRE(base.size() == harvested.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    CHECK(base[k].t == harvested[k].t);
    CHECK(base[k].e == harvested[k].e);
    CHECK(harvested[k].tau <= base[k].tau + 1e-9);
  }

  std::ostringstream out;
  write_surface_csv(out, std::vector<SurfacePoint>{{1, 2, 0.5}});
  CHECK(out.str() == "t,e,tau\n1,2,0.5\n");
}

TEST_CASE("VoI curve invariants") {
  const std::vector<int> caps{1, 2, 3, 5, 8, 13, 20};
  const auto none = voi_curve(gaussian_pair(20, 1), caps, QuadratureConfig{});
  const auto p1 = voi_curve(gaussian_pair(20, 1, 0.0, harvest_p1()), caps, QuadratureConfig{});
  const auto p2 = voi_curve(gaussian_pair(20, 1, 0.0, harvest_p2()), caps, QuadratureConfig{});
  REQUIRE(none.rows.size() == caps.size());
  for (std::size_t k = 0; k < caps.size(); ++k) {
    for (const auto* curve : {&none, &p1, &p2}) {
      const auto& row = curve->rows[k];
      CHECK(row.capacity == caps[k]);
      CHECK(row.voi == doctest::Approx(row.j_blind - row.j_star));
      CHECK(row.voi >= -1e-9);
      if (k > 0) CHECK(row.j_star <= curve->rows[k - 1].j_star + 1e-9);
    }
    CHECK(p1.rows[k].j_star <= none.rows[k].j_star + 1e-9);
    CHECK(p2.rows[k].j_star <= p1.rows[k].j_star + 1e-9);
    CHECK(none.rows[k].j_blind == doctest::Approx(blind_cost(gaussian_pair(20, caps[k]))));
  }
  CHECK_THROWS_AS(voi_curve(gaussian_pair(20, 1), {}, QuadratureConfig{}), ConfigError);
  CHECK_THROWS_AS(voi_curve(gaussian_pair(20, 1), {3, 3}, QuadratureConfig{}), ConfigError);
}

TEST_CASE("VoI when energy never binds") {
  const auto curve = voi_curve(gaussian_pair(5, 1), {5, 6}, QuadratureConfig{});
  for (const auto& row : curve.rows) {
    CHECK(row.j_blind == doctest::Approx(5.0));
    CHECK(row.j_star == doctest::Approx(5.0 * (1.0 - 2.0 / std::numbers::pi)).epsilon(1e-10));
  }
  std::ostringstream out;
  write_voi_csv(out, curve);
  CHECK(out.str().rfind("B,J_blind,J_star,VoI\n5,", 0) == 0);
}

TEST_CASE("VoI argmax takes the first maximizer") {
  VoiCurve curve;
  curve.rows = {{1, 0, 0, 1.0}, {2, 0, 0, 3.0}, {3, 0, 0, 3.0}};
  CHECK(curve.argmax() == 2);
}

TEST_CASE("battery equivalence for the blind policy") {
  const Instance tmpl = gaussian_pair(100, 1);
  const auto eq = battery_equivalent(147.37, tmpl, PolicyKind::Blind);
  REQUIRE(eq.capacity.has_value());
  CHECK(*eq.capacity == 53);
  CHECK(100.0 * (53 - 10) / 53.0 == doctest::Approx(81.13).epsilon(1e-4));

  const auto trivial = battery_equivalent(200.0, tmpl, PolicyKind::Blind);
  REQUIRE(trivial.capacity.has_value());
  CHECK(*trivial.capacity == 1);
  CHECK_FALSE(trivial.note.empty());

  const auto unreachable = battery_equivalent(99.0, tmpl, PolicyKind::Blind);
  CHECK_FALSE(unreachable.capacity.has_value());
  CHECK_FALSE(unreachable.note.empty());
}

TEST_CASE("battery equivalence for the optimal policy agrees with a scan") {
  const Instance tmpl = gaussian_pair(15, 1, 0.1);
  const QuadratureConfig quad;
  const double target = policy_cost(tmpl, 4, PolicyKind::Optimal, quad) + 1e-6;
  int scanned = 0;
  for (int cap = 1; cap <= 15; ++cap) {
    if (policy_cost(tmpl, cap, PolicyKind::Optimal, quad) <= target) {
      scanned = cap;
      break;
    }
  }
  const auto eq = battery_equivalent(target, tmpl, PolicyKind::Optimal, quad);
  REQUIRE(eq.capacity.has_value());
  CHECK(*eq.capacity == scanned);
  CHECK(scanned <= 4);
}
