// ehsched: compute optimal scheduling thresholds, simulate policies and
// produce value-of-information curves from a JSON instance config.
//
// Exit codes: 0 success, 2 config error, 3 missing artifact, 4 internal
// consistency failure.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ehsched/blind.hpp"
#include "ehsched/dp.hpp"
#include "ehsched/io.hpp"
#include "ehsched/policy.hpp"
#include "ehsched/report.hpp"
#include "ehsched/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ehsched;

namespace {

class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config;
  std::string out = ".";
  std::string quad = "quadrature";
  int nodes = 64;
  long mc_samples = 200000;
  std::uint64_t seed = 0;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_config = true) {
  auto* cfg = cmd->add_option("--config", o.config, "Instance config (JSON)");
  if (needs_config) cfg->required();
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--quad", o.quad, "Stage expectation scheme")
      ->check(CLI::IsMember({"quadrature", "mc"}));
  cmd->add_option("--nodes", o.nodes, "Quadrature panels per source axis");
  cmd->add_option("--mc-samples", o.mc_samples, "Samples for --quad mc");
  cmd->add_option("--seed", o.seed, "Seed for every random draw");
  cmd->add_option("--threads", o.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
}

QuadratureConfig quad_from(const CommonOptions& o) {
  QuadratureConfig q;
  q.scheme = parse_quad_scheme(o.quad);
  q.nodes_per_dim = o.nodes;
  q.mc_samples = o.mc_samples;
  q.mc_seed = o.seed;
  q.validate();
  return q;
}

Instance load_with_warnings(const CommonOptions& o) {
  Instance inst = load_instance(o.config);
  for (const auto& w : inst.warnings()) std::cerr << "warning: " << w << '\n';
  return inst;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void write_manifest(const CommonOptions& o, const std::string& command, const Instance& inst,
                    const json& outputs, json extra = json::object()) {
  json m;
  m["schema_version"] = kSchemaVersion;
  m["command"] = command;
  m["config"] = o.config;
  m["quadrature"] = quadrature_to_json(quad_from(o));
  m["seed"] = o.seed;
  m["outputs"] = outputs;
  m["tool_version"] = kToolVersion;
  m["instance_hash"] = instance_hash(inst);
  for (auto& [k, v] : extra.items()) m[k] = v;
  write_text_file(fs::path(o.out) / ("manifest_" + command + ".json"), dump(m));
}

template <class Emit>
std::string render(Emit&& emit) {
  std::ostringstream out;
  emit(out);
  return out.str();
}

int cmd_thresholds(const CommonOptions& o) {
  const Instance inst = load_with_warnings(o);
  const QuadratureConfig quad = quad_from(o);
  DpOptions opts;
  opts.threads = o.threads;
  const fs::path out(o.out);
  const std::string hash = instance_hash(inst);
  json outputs = json::array();
  if (inst.is_uniform()) {
    const DpResult res = backward_induction(inst, quad, opts);
    write_text_file(out / "thresholds.csv", render([&](auto& s) { write_thresholds_csv(s, res); }));
    write_text_file(out / "thresholds.json", dump(thresholds_to_json(res, hash)));
    write_text_file(out / "surface.csv", render([&](auto& s) {
                      write_surface_csv(s, threshold_surface(res.thresholds));
                    }));
    outputs = {"thresholds.csv", "thresholds.json", "surface.csv"};
    std::cout << "V_1(" << inst.initial_energy() << ") = "
              << json(res.values.at(1, inst.initial_energy())).dump() << '\n';
  } else {
    const GeneralDpResult res = backward_induction_general(inst, quad, opts);
    write_text_file(out / "general_thresholds.csv",
                    render([&](auto& s) { write_thresholds_csv(s, res); }));
    write_text_file(out / "general_thresholds.json", dump(thresholds_to_json(res, hash)));
    outputs = {"general_thresholds.csv", "general_thresholds.json"};
    std::cout << "V_1(" << inst.initial_energy() << ") = "
              << json(res.values.at(1, inst.initial_energy())).dump() << '\n';
  }
  write_manifest(o, "thresholds", inst, outputs);
  return 0;
}

json load_table(const fs::path& path, const std::string& hash) {
  if (!fs::exists(path)) throw MissingArtifact("threshold table not found: " + path.string());
  json doc = read_json_file(path);
  if (doc.value("instance_hash", "") != hash) {
    throw ConfigError(path.string() + ": threshold table was computed for a different instance");
  }
  return doc;
}

int cmd_simulate(const CommonOptions& o, const std::string& policy_name, long episodes,
                 std::string table_path, const std::string& trace_path) {
  const Instance inst = load_with_warnings(o);
  if (episodes < 1) throw ConfigError("--episodes must be >= 1");
  const std::string hash = instance_hash(inst);
  Policy policy;
  if (policy_name == "optimal") {
    if (table_path.empty()) table_path = (fs::path(o.out) / "thresholds.json").string();
    policy = make_optimal_policy(inst, thresholds_from_json(load_table(table_path, hash)).thresholds);
  } else if (policy_name == "weighted") {
    if (table_path.empty()) table_path = (fs::path(o.out) / "general_thresholds.json").string();
    policy = make_weighted_policy(
        inst, general_thresholds_from_json(load_table(table_path, hash)).thresholds);
  } else {
    policy = make_blind_policy(inst);
  }
  const CostEstimate est = monte_carlo_cost(inst, policy, episodes, o.seed, o.threads);
  json doc = cost_estimate_to_json(est);
  doc["policy"] = policy_name;
  doc["instance_hash"] = hash;
  if (policy_name == "blind") {
    doc["analytic_blind_cost"] = blind_cost(inst);
    doc["analytic_blind_cost_with_comm"] = blind_cost_with_comm(inst);
  }
  const std::string name = "cost_" + policy_name + ".json";
  write_text_file(fs::path(o.out) / name, dump(doc));
  json outputs = {name};
  if (!trace_path.empty()) {
    const auto trace = run_episode(inst, policy.scheduler, policy.estimator, episode_seed(o.seed, 0));
    write_text_file(trace_path, render([&](auto& s) { write_trace_csv(s, trace); }));
    outputs.push_back(trace_path);
  }
  write_manifest(o, "simulate", inst, outputs,
                 {{"policy", policy_name}, {"episodes", episodes}, {"thresholds", table_path}});
  std::cout << "mean = " << json(est.mean).dump() << "  std_error = " << json(est.std_error).dump()
            << '\n';
  return 0;
}

int cmd_voi(const CommonOptions& o, int bmin, int bmax) {
  const Instance inst = load_with_warnings(o);
  if (bmax < 0) bmax = inst.horizon();
  if (bmin < 1 || bmin > bmax) {
    throw ConfigError("empty capacity range [" + std::to_string(bmin) + ", " +
                      std::to_string(bmax) + "]");
  }
  std::vector<int> caps;
  for (int b = bmin; b <= bmax; ++b) caps.push_back(b);
  const VoiCurve curve = voi_curve(inst, caps, quad_from(o), o.threads);
  write_text_file(fs::path(o.out) / "voi.csv", render([&](auto& s) { write_voi_csv(s, curve); }));
  json rows = json::array();
  for (const auto& r : curve.rows) {
    rows.push_back({{"B", r.capacity}, {"J_blind", r.j_blind}, {"J_star", r.j_star}, {"VoI", r.voi}});
  }
  json doc = {{"schema_version", kSchemaVersion}, {"kind", "voi_curve"},
              {"instance_hash", instance_hash(inst)}, {"argmax_B", curve.argmax()}, {"rows", rows}};
  write_text_file(fs::path(o.out) / "voi.json", dump(doc));
  write_manifest(o, "voi", inst, {"voi.csv", "voi.json"}, {{"bmin", bmin}, {"bmax", bmax}});
  std::cout << "argmax_B VoI = " << curve.argmax() << '\n';
  return 0;
}

int cmd_blind(const CommonOptions& o) {
  const Instance inst = load_with_warnings(o);
  const auto dist = energy_chain(inst);
  write_text_file(fs::path(o.out) / "energy.csv", render([&](auto& s) { write_energy_csv(s, dist); }));
  json doc = {{"schema_version", kSchemaVersion},
              {"kind", "blind_cost"},
              {"instance_hash", instance_hash(inst)},
              {"blind_cost", blind_cost(inst)},
              {"blind_cost_with_comm", blind_cost_with_comm(inst)}};
  write_text_file(fs::path(o.out) / "blind.json", dump(doc));
  write_manifest(o, "blind", inst, {"energy.csv", "blind.json"});
  std::cout << "J_blind = " << json(blind_cost(inst)).dump() << '\n';
  return 0;
}

std::vector<Vec> parse_point(const std::string& text) {
  std::vector<Vec> x;
  std::stringstream sensors(text);
  std::string item;
  while (std::getline(sensors, item, ';')) {
    Vec v;
    std::stringstream coords(item);
    std::string c;
    while (std::getline(coords, c, ',')) {
      try {
        v.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw ConfigError("--x: cannot parse '" + c + "'");
      }
    }
    x.push_back(std::move(v));
  }
  return x;
}

int cmd_decide(const CommonOptions& o, const std::string& table_path, int t, int e,
               const std::string& point) {
  const Instance inst = load_instance(o.config);
  const json doc = load_table(table_path, instance_hash(inst));
  const auto x = parse_point(point);
  if (static_cast<int>(x.size()) != inst.num_sensors()) {
    throw ConfigError("--x must give one vector per sensor, separated by ';'");
  }
  std::vector<Vec> centers;
  for (int i = 0; i < inst.num_sensors(); ++i) {
    if (static_cast<int>(x[i].size()) != inst.source(i).dim()) {
      throw ConfigError("--x: sensor " + std::to_string(i + 1) + " has the wrong dimension");
    }
    centers.push_back(inst.source(i).center());
  }
  if (t < 1 || t > inst.horizon()) throw ConfigError("--t outside [1, horizon]");
  if (e < 0 || e > inst.capacity()) throw ConfigError("--e outside [0, capacity]");
  Decision d;
  if (doc.value("kind", "") == "general_threshold_table") {
    const auto table = general_thresholds_from_json(doc).thresholds;
    d = weighted_schedule(x, e, t, table, inst.weights(), centers);
  } else {
    const auto table = thresholds_from_json(doc).thresholds;
    d = optimal_schedule(x, e, t, table, centers);
  }
  std::cout << "u = " << d.u << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal energy-harvesting sensor scheduling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonOptions th_o, sim_o, voi_o, blind_o, dec_o;
  auto* th = app.add_subcommand("thresholds", "Compute threshold and value tables");
  add_common(th, th_o);

  std::string policy = "optimal", sim_table, trace;
  long episodes = 100000;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo cost of a policy");
  add_common(sim, sim_o);
  sim->add_option("--policy", policy)->check(CLI::IsMember({"optimal", "blind", "weighted"}));
  sim->add_option("--episodes", episodes);
  sim->add_option("--thresholds", sim_table, "Threshold table JSON (default: <out>/thresholds.json)");
  sim->add_option("--trace", trace, "Write the first episode's trace to this CSV");

  int bmin = 1, bmax = -1;
  auto* voi = app.add_subcommand("voi", "Blind vs optimal cost and VoI over capacities");
  add_common(voi, voi_o);
  voi->add_option("--bmin", bmin);
  voi->add_option("--bmax", bmax, "Default: horizon");

  auto* blind = app.add_subcommand("blind", "Analytic blind-policy cost and battery pmf");
  add_common(blind, blind_o);

  std::string dec_table, point;
  int dec_t = 1, dec_e = 0;
  auto* dec = app.add_subcommand("decide", "Evaluate one decision against a saved table");
  add_common(dec, dec_o);
  dec->add_option("--thresholds", dec_table)->required();
  dec->add_option("--t", dec_t)->required();
  dec->add_option("--e", dec_e)->required();
  dec->add_option("--x", point, "Sensor vectors: coords by ',', sensors by ';'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*th) return cmd_thresholds(th_o);
    if (*sim) return cmd_simulate(sim_o, policy, episodes, sim_table, trace);
    if (*voi) return cmd_voi(voi_o, bmin, bmax);
    if (*blind) return cmd_blind(blind_o);
    if (*dec) return cmd_decide(dec_o, dec_table, dec_t, dec_e, point);
  } catch (const MissingArtifact& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 3;
  } catch (const ConsistencyError& err) {
    std::cerr << "internal consistency failure: " << err.what() << '\n';
    return 4;
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 2;
  } catch (const DomainError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
