#include <doctest.h>

#include <cmath>
#include <sstream>

#include "common.hpp"
#include "ehsched/io.hpp"

using namespace ehsched;
using namespace ehsched::testing;

namespace {

const char* kValid = R"({
  "schema_version": 1,
  "sources": [
    {"family": "gaussian-isotropic", "dim": 1, "sigma2": 1.0, "center": [0.0]},
    {"family": "gaussian-diagonal", "variances": [1.0, 3.0], "center": [0.0, 1.0]}
  ],
  "capacity": 4,
  "horizon": 9,
  "comm_costs": [0.1, 0.2],
  "weights": [1.0, 2.0],
  "harvest": {"0": 0.7, "1": 0.3},
  "initial_energy": 2
})";

std::string message_of(const std::string& text) {
  try {
    parse_instance(text, "cfg.json");
  } catch (const ConfigError& err) {
    return err.what();
  }
  return "";
}

}  // namespace

TEST_CASE("valid config parses") {
  const Instance inst = parse_instance(kValid);
  CHECK(inst.num_sensors() == 2);
  CHECK(inst.capacity() == 4);
  CHECK(inst.horizon() == 9);
  CHECK(inst.initial_energy() == 2);
  CHECK(inst.comm_cost(1) == 0.2);
  CHECK(inst.weights()[1] == 2.0);
  CHECK(inst.harvest().prob(1) == doctest::Approx(0.3));
  CHECK(inst.source(1).family() == SourceFamily::GaussianDiagonal);
  CHECK(inst.source(1).dim() == 2);
  CHECK_FALSE(inst.is_uniform());
}

TEST_CASE("config errors carry the offending line") {
  std::string bad_sum = kValid;
  bad_sum.replace(bad_sum.find("0.3}"), 3, "0.2");
  const std::string msg = message_of(bad_sum);
  CHECK(msg.find("cfg.json:11:") == 0);
  CHECK(msg.find("harvest") != std::string::npos);

  std::string continuous = kValid;
  continuous.replace(continuous.find("\"1\": 0.3"), 8, "\"0.5\": 0.3");
  CHECK(message_of(continuous).find("cfg.json:11:") == 0);

  std::string bad_cap = kValid;
  bad_cap.replace(bad_cap.find("\"capacity\": 4"), 13, "\"capacity\": 0");
  CHECK(message_of(bad_cap).find("cfg.json:7:") == 0);

  std::string bad_sigma = kValid;
  bad_sigma.replace(bad_sigma.find("1.0, \"center\": [0.0]}"), 3, "-1.");
  CHECK(message_of(bad_sigma).find("cfg.json:4:") == 0);

  CHECK(message_of("{ \"sources\": [").find("cfg.json:1:") == 0);
  CHECK_FALSE(message_of(R"({"schema_version": 2, "sources": []})").empty());

  std::string both = kValid;
  both.replace(both.find("\"comm_costs\""), 0, "\"comm_cost\": 0.1, ");
  CHECK_FALSE(message_of(both).empty());
}

TEST_CASE("instance JSON round-trips and hashes stably") {
  const Instance inst = parse_instance(kValid);
  const auto doc = instance_to_json(inst);
  const Instance again = parse_instance(doc.dump(2));
  CHECK(instance_to_json(again) == doc);
  CHECK(instance_hash(inst) == instance_hash(again));
  CHECK(instance_hash(inst).size() == 16);
  CHECK(instance_hash(inst) != instance_hash(inst.with_horizon(10)));

  const Instance custom = gaussian_pair(3, 2);
  InstanceParams p;
  p.sources = {radial_source(nine_point_law()), standard_gaussian()};
  p.horizon = 2;
  const Instance radial(std::move(p));
  CHECK(instance_to_json(parse_instance(instance_to_json(radial).dump())) == instance_to_json(radial));
  CHECK(instance_hash(custom) != instance_hash(radial));
}

TEST_CASE("threshold tables round-trip") {
  const Instance inst = gaussian_pair(6, 3, 0.2, harvest_p1());
  const auto dp = backward_induction(inst, QuadratureConfig{});
  const auto doc = thresholds_to_json(dp, instance_hash(inst));
  const auto back = thresholds_from_json(nlohmann::json::parse(doc.dump()));
  for (int t = 1; t <= 7; ++t) {
    for (int e = 0; e <= 3; ++e) CHECK(back.values.at(t, e) == dp.values.at(t, e));
  }
  for (int t = 1; t <= 6; ++t) {
    CHECK(std::isnan(back.thresholds.tau(t, 0)));
    for (int e = 1; e <= 3; ++e) {
      CHECK(back.thresholds.tau(t, e) == dp.thresholds.tau(t, e));
      CHECK(back.thresholds.c0(t, e) == dp.thresholds.c0(t, e));
      CHECK(back.thresholds.c1(t, e) == dp.thresholds.c1(t, e));
    }
  }
  CHECK_THROWS_AS(general_thresholds_from_json(doc), ConfigError);

  const auto gen = backward_induction_general(inst, QuadratureConfig{});
  const auto gdoc = thresholds_to_json(gen, instance_hash(inst));
  const auto gback = general_thresholds_from_json(nlohmann::json::parse(gdoc.dump()));
  for (int t = 1; t <= 6; ++t) {
    for (int e = 1; e <= 3; ++e) {
      for (int i = 1; i <= 2; ++i) CHECK(gback.thresholds.tau(t, e, i) == gen.thresholds.tau(t, e, i));
    }
  }
  CHECK_THROWS_AS(thresholds_from_json(gdoc), ConfigError);

  std::ostringstream csv;
  write_thresholds_csv(csv, dp);
  CHECK(csv.str().rfind("t,e,tau,c0,c1,value\n", 0) == 0);
}
