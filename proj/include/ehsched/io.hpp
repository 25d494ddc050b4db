#pragma once

// Config loading and versioned serialization of every artifact the CLI
// reads or writes.

#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "ehsched/blind.hpp"
#include "ehsched/dp.hpp"
#include "ehsched/model.hpp"
#include "ehsched/sim.hpp"
#include "ehsched/stage.hpp"

namespace ehsched {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

// Throws ConfigError with "<origin>:<line>: message".
Instance parse_instance(const std::string& text, const std::string& origin = "<config>");
Instance load_instance(const std::filesystem::path& path);

nlohmann::json instance_to_json(const Instance& instance);
// FNV-1a 64 over the canonical JSON form, as 16 hex digits.
std::string instance_hash(const Instance& instance);

nlohmann::json quadrature_to_json(const QuadratureConfig& quad);

nlohmann::json thresholds_to_json(const DpResult& result, const std::string& hash);
nlohmann::json thresholds_to_json(const GeneralDpResult& result, const std::string& hash);
DpResult thresholds_from_json(const nlohmann::json& doc);
GeneralDpResult general_thresholds_from_json(const nlohmann::json& doc);

void write_thresholds_csv(std::ostream& out, const DpResult& result);
void write_thresholds_csv(std::ostream& out, const GeneralDpResult& result);
void write_energy_csv(std::ostream& out, const EnergyDistribution& dist);

nlohmann::json cost_estimate_to_json(const CostEstimate& est);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ehsched
