#include "ehsched/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace ehsched {

using nlohmann::json;

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Line of the nth occurrence of "key" in the raw text, or 1 if absent.
int line_of_key(const std::string& text, const std::string& key, int nth = 0) {
  const std::string needle = "\"" + key + "\"";
  std::size_t pos = 0;
  for (int k = 0; k <= nth; ++k) {
    pos = text.find(needle, k == 0 ? 0 : pos + 1);
    if (pos == std::string::npos) return 1;
  }
  return line_of_offset(text, pos);
}

// ConfigError that already carries its origin and line.
class LocatedError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ConfigReader {
 public:
  ConfigReader(const std::string& text, std::string origin)
      : text_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw LocatedError(origin_ + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail_at(const std::string& key, const std::string& msg, int nth = 0) const {
    fail(line_of_key(text_, key, nth), msg);
  }

  json parse() const {
    try {
      return json::parse(text_);
    } catch (const json::parse_error& err) {
      fail(line_of_offset(text_, err.byte == 0 ? 0 : err.byte - 1), err.what());
    }
  }

  double number(const json& obj, const std::string& key, int nth = 0) const {
    const auto& v = obj.at(key);
    if (!v.is_number()) fail_at(key, "'" + key + "' must be a number", nth);
    return v.get<double>();
  }

  int integer(const json& obj, const std::string& key) const {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail_at(key, "'" + key + "' must be an integer");
    return v.get<int>();
  }

  Vec vec(const json& obj, const std::string& key, int nth = 0) const {
    const auto& v = obj.at(key);
    if (!v.is_array()) fail_at(key, "'" + key + "' must be an array of numbers", nth);
    Vec out;
    for (const auto& x : v) {
      if (!x.is_number()) fail_at(key, "'" + key + "' must be an array of numbers", nth);
      out.push_back(x.get<double>());
    }
    return out;
  }

  const std::string& text() const { return text_; }

 private:
  const std::string& text_;
  std::string origin_;
};

SourceSpec parse_source(const ConfigReader& rd, const json& src, int index) {
  const std::string label = "sources[" + std::to_string(index) + "]";
  if (!src.is_object() || !src.contains("family") || !src.at("family").is_string()) {
    rd.fail_at("sources", label + " needs a string 'family'");
  }
  const int line = line_of_key(rd.text(), "family", index);
  const std::string family = src.at("family").get<std::string>();
  auto numbers = [&](const char* key) {
    const auto& v = src.at(key);
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
      rd.fail(line, label + "." + key + " must be an array of numbers");
    }
    return v.get<Vec>();
  };
  std::optional<int> dim;
  if (src.contains("dim")) {
    if (!src.at("dim").is_number_integer() || src.at("dim").get<int>() < 1) {
      rd.fail(line, label + ".dim must be a positive integer");
    }
    dim = src.at("dim").get<int>();
  }
  Vec center;
  if (src.contains("center")) center = numbers("center");
  auto resolve_center = [&](int n) {
    if (center.empty()) center.assign(n, 0.0);
    if (static_cast<int>(center.size()) != n) rd.fail(line, label + ": center length != dim");
  };
  const int default_dim = center.empty() ? 1 : static_cast<int>(center.size());
  try {
    if (family == "gaussian-isotropic") {
      if (!src.contains("sigma2") || !src.at("sigma2").is_number()) {
        rd.fail(line, label + ": gaussian-isotropic source needs a numeric 'sigma2'");
      }
      resolve_center(dim.value_or(default_dim));
      return SourceSpec::gaussian_isotropic(center, src.at("sigma2").get<double>());
    }
    if (family == "gaussian-diagonal") {
      if (!src.contains("variances")) rd.fail(line, label + ": gaussian-diagonal source needs 'variances'");
      const Vec variances = numbers("variances");
      resolve_center(dim.value_or(static_cast<int>(variances.size())));
      return SourceSpec::gaussian_diagonal(center, variances);
    }
    if (family == "custom-radial") {
      if (!src.contains("nodes") || !src.contains("weights")) {
        rd.fail(line, label + ": custom-radial source needs 'nodes' and 'weights'");
      }
      resolve_center(dim.value_or(default_dim));
      return SourceSpec::custom_radial(center, numbers("nodes"), numbers("weights"));
    }
  } catch (const LocatedError&) {
    throw;
  } catch (const ConfigError& err) {
    rd.fail(line, label + ": " + err.what());
  }
  rd.fail(line, label + ": unknown source family '" + family + "'");
}

HarvestPmf parse_harvest(const ConfigReader& rd, const json& h) {
  if (!h.is_object()) rd.fail_at("harvest", "'harvest' must map integer z to probability");
  std::map<int, double> probs;
  for (const auto& [key, value] : h.items()) {
    const bool integral =
        !key.empty() && std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (!integral) {
      rd.fail_at(key, "harvest support must be nonnegative integers (got '" + key + "')");
    }
    if (!value.is_number()) rd.fail_at(key, "harvest probability for z=" + key + " must be a number");
    probs[std::stoi(key)] = value.get<double>();
  }
  try {
    return HarvestPmf(probs);
  } catch (const LocatedError&) {
    throw;
  } catch (const ConfigError& err) {
    rd.fail_at("harvest", err.what());
  }
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

json nan_to_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }
double null_to_nan(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

void check_kind(const json& doc, const std::string& kind) {
  if (!doc.contains("schema_version") || doc.at("schema_version").get<int>() != kSchemaVersion) {
    throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  if (doc.value("kind", "") != kind) throw ConfigError("expected a '" + kind + "' document");
}

json value_rows(const ValueTable& values) {
  json rows = json::array();
  for (int t = 1; t <= values.horizon() + 1; ++t) {
    const auto r = values.row(t);
    rows.push_back(Vec(r.begin(), r.end()));
  }
  return rows;
}

ValueTable values_from(const json& rows, int horizon, int cap) {
  ValueTable values(horizon, cap);
  for (int t = 1; t <= horizon + 1; ++t) {
    for (int e = 0; e <= cap; ++e) values.at(t, e) = rows.at(t - 1).at(e).get<double>();
  }
  return values;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

Instance parse_instance_document(const ConfigReader& rd);

Instance parse_instance(const std::string& text, const std::string& origin) {
  ConfigReader rd(text, origin);
  try {
    return parse_instance_document(rd);
  } catch (const json::exception& err) {
    rd.fail(1, err.what());
  }
}

Instance parse_instance_document(const ConfigReader& rd) {
  const json doc = rd.parse();
  if (!doc.is_object()) rd.fail(1, "config must be a JSON object");
  if (doc.contains("schema_version") &&
      (!doc.at("schema_version").is_number_integer() ||
       doc.at("schema_version").get<int>() != kSchemaVersion)) {
    rd.fail_at("schema_version", "unsupported schema_version (expected " +
                                     std::to_string(kSchemaVersion) + ")");
  }
  for (const char* key : {"sources", "capacity", "horizon"}) {
    if (!doc.contains(key)) rd.fail(1, std::string("missing required key '") + key + "'");
  }
  InstanceParams p;
  const auto& sources = doc.at("sources");
  if (!sources.is_array()) rd.fail_at("sources", "'sources' must be an array");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    p.sources.push_back(parse_source(rd, sources[i], static_cast<int>(i)));
  }
  p.capacity = rd.integer(doc, "capacity");
  p.horizon = rd.integer(doc, "horizon");
  if (doc.contains("comm_cost") && doc.contains("comm_costs")) {
    rd.fail_at("comm_costs", "give either 'comm_cost' or 'comm_costs', not both");
  }
  if (doc.contains("comm_cost")) p.comm_costs = {rd.number(doc, "comm_cost")};
  if (doc.contains("comm_costs")) p.comm_costs = rd.vec(doc, "comm_costs");
  if (doc.contains("weights")) p.weights = rd.vec(doc, "weights");
  if (doc.contains("harvest")) p.harvest = parse_harvest(rd, doc.at("harvest"));
  if (doc.contains("initial_energy")) p.initial_energy = rd.integer(doc, "initial_energy");
  try {
    return Instance(std::move(p));
  } catch (const LocatedError&) {
    throw;
  } catch (const ConfigError& err) {
    const std::string what = err.what();
    std::string key = "capacity";
    if (what.find("horizon") != std::string::npos) key = "horizon";
    if (what.find("initial_energy") != std::string::npos) key = "initial_energy";
    if (what.find("weights") != std::string::npos) key = "weights";
    if (what.find("comm") != std::string::npos) {
      key = doc.contains("comm_costs") ? "comm_costs" : "comm_cost";
    }
    if (what.find("sensors") != std::string::npos) key = "sources";
    rd.fail_at(key, what);
  }
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ":1: cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), path.string());
}

json instance_to_json(const Instance& instance) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  json sources = json::array();
  for (const auto& s : instance.sources()) {
    json j;
    j["family"] = to_string(s.family());
    j["dim"] = s.dim();
    j["center"] = s.center();
    switch (s.family()) {
      case SourceFamily::GaussianIsotropic:
        j["sigma2"] = s.variances().front();
        break;
      case SourceFamily::GaussianDiagonal:
        j["variances"] = s.variances();
        break;
      case SourceFamily::CustomRadial:
        j["nodes"] = Vec(s.atoms().begin(), s.atoms().end());
        j["weights"] = Vec(s.atom_weights().begin(), s.atom_weights().end());
        break;
    }
    sources.push_back(std::move(j));
  }
  doc["sources"] = std::move(sources);
  doc["capacity"] = instance.capacity();
  doc["horizon"] = instance.horizon();
  doc["comm_costs"] = instance.comm_costs();
  doc["weights"] = instance.weights();
  json harvest = json::object();
  const auto probs = instance.harvest().probs();
  for (std::size_t z = 0; z < probs.size(); ++z) {
    if (probs[z] > 0.0) harvest[std::to_string(z)] = probs[z];
  }
  doc["harvest"] = std::move(harvest);
  doc["initial_energy"] = instance.initial_energy();
  return doc;
}

std::string instance_hash(const Instance& instance) {
  return fnv1a_hex(instance_to_json(instance).dump());
}

json quadrature_to_json(const QuadratureConfig& quad) {
  return json{{"scheme", to_string(quad.scheme)},
              {"nodes_per_dim", quad.nodes_per_dim},
              {"mc_samples", quad.mc_samples},
              {"mc_seed", quad.mc_seed}};
}

json thresholds_to_json(const DpResult& result, const std::string& hash) {
  const auto& th = result.thresholds;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "threshold_table";
  doc["instance_hash"] = hash;
  doc["horizon"] = th.horizon();
  doc["capacity"] = th.capacity();
  json tau = json::array(), c0 = json::array(), c1 = json::array();
  for (int t = 1; t <= th.horizon(); ++t) {
    json rt = json::array(), r0 = json::array(), r1 = json::array();
    for (int e = 0; e <= th.capacity(); ++e) {
      rt.push_back(nan_to_null(th.tau(t, e)));
      r0.push_back(nan_to_null(th.c0(t, e)));
      r1.push_back(nan_to_null(th.c1(t, e)));
    }
    tau.push_back(std::move(rt));
    c0.push_back(std::move(r0));
    c1.push_back(std::move(r1));
  }
  doc["tau"] = std::move(tau);
  doc["c0"] = std::move(c0);
  doc["c1"] = std::move(c1);
  doc["value"] = value_rows(result.values);
  return doc;
}

json thresholds_to_json(const GeneralDpResult& result, const std::string& hash) {
  const auto& th = result.thresholds;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "general_threshold_table";
  doc["instance_hash"] = hash;
  doc["horizon"] = th.horizon();
  doc["capacity"] = th.capacity();
  doc["num_sensors"] = th.num_sensors();
  json tau = json::array(), c0 = json::array(), c1 = json::array();
  for (int t = 1; t <= th.horizon(); ++t) {
    json rt = json::array(), r0 = json::array(), r1 = json::array();
    for (int e = 0; e <= th.capacity(); ++e) {
      json ct = json::array(), cc = json::array();
      for (int i = 1; i <= th.num_sensors(); ++i) {
        ct.push_back(nan_to_null(th.tau(t, e, i)));
        cc.push_back(nan_to_null(th.c1(t, e, i)));
      }
      rt.push_back(std::move(ct));
      r1.push_back(std::move(cc));
      r0.push_back(nan_to_null(th.c0(t, e)));
    }
    tau.push_back(std::move(rt));
    c0.push_back(std::move(r0));
    c1.push_back(std::move(r1));
  }
  doc["tau"] = std::move(tau);
  doc["c0"] = std::move(c0);
  doc["c1"] = std::move(c1);
  doc["value"] = value_rows(result.values);
  return doc;
}

DpResult thresholds_from_json(const json& doc) {
  check_kind(doc, "threshold_table");
  const int horizon = doc.at("horizon").get<int>();
  const int cap = doc.at("capacity").get<int>();
  DpResult out{values_from(doc.at("value"), horizon, cap), ThresholdTable(horizon, cap)};
  for (int t = 1; t <= horizon; ++t) {
    for (int e = 0; e <= cap; ++e) {
      out.thresholds.set(t, e, null_to_nan(doc.at("tau").at(t - 1).at(e)),
                         null_to_nan(doc.at("c0").at(t - 1).at(e)),
                         null_to_nan(doc.at("c1").at(t - 1).at(e)));
    }
  }
  return out;
}

GeneralDpResult general_thresholds_from_json(const json& doc) {
  check_kind(doc, "general_threshold_table");
  const int horizon = doc.at("horizon").get<int>();
  const int cap = doc.at("capacity").get<int>();
  const int n = doc.at("num_sensors").get<int>();
  GeneralDpResult out{values_from(doc.at("value"), horizon, cap),
                      GeneralThresholdTable(horizon, cap, n)};
  Vec tau(n), c1(n);
  for (int t = 1; t <= horizon; ++t) {
    for (int e = 0; e <= cap; ++e) {
      for (int i = 0; i < n; ++i) {
        tau[i] = null_to_nan(doc.at("tau").at(t - 1).at(e).at(i));
        c1[i] = null_to_nan(doc.at("c1").at(t - 1).at(e).at(i));
      }
      out.thresholds.set(t, e, null_to_nan(doc.at("c0").at(t - 1).at(e)), c1, tau);
    }
  }
  return out;
}

void write_thresholds_csv(std::ostream& out, const DpResult& result) {
  const auto& th = result.thresholds;
  out << "t,e,tau,c0,c1,value\n";
  for (int t = 1; t <= th.horizon(); ++t) {
    for (int e = 0; e <= th.capacity(); ++e) {
      out << t << ',' << e << ',' << csv_number(th.tau(t, e)) << ',' << csv_number(th.c0(t, e))
          << ',' << csv_number(th.c1(t, e)) << ',' << csv_number(result.values.at(t, e)) << '\n';
    }
  }
}

void write_thresholds_csv(std::ostream& out, const GeneralDpResult& result) {
  const auto& th = result.thresholds;
  out << "t,e,sensor,tau,c0,c1,value\n";
  for (int t = 1; t <= th.horizon(); ++t) {
    for (int e = 0; e <= th.capacity(); ++e) {
      for (int i = 1; i <= th.num_sensors(); ++i) {
        out << t << ',' << e << ',' << i << ',' << csv_number(th.tau(t, e, i)) << ','
            << csv_number(th.c0(t, e)) << ',' << csv_number(th.c1(t, e, i)) << ','
            << csv_number(result.values.at(t, e)) << '\n';
      }
    }
  }
}

void write_energy_csv(std::ostream& out, const EnergyDistribution& dist) {
  out << "t,e,prob\n";
  for (int t = 1; t <= dist.horizon(); ++t) {
    for (int e = 0; e <= dist.capacity(); ++e) {
      out << t << ',' << e << ',' << csv_number(dist.prob(t, e)) << '\n';
    }
  }
}

json cost_estimate_to_json(const CostEstimate& est) {
  return json{{"schema_version", kSchemaVersion}, {"kind", "cost_estimate"},
              {"mean", est.mean},                 {"std_error", est.std_error},
              {"std_error_defined", est.std_error_defined},
              {"n_episodes", est.n_episodes},     {"seed", est.seed}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw ConfigError(path.string() + ": " + err.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path.string() + ": cannot write");
  out << text;
}

}  // namespace ehsched
