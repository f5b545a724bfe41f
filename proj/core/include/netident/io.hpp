#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "netident/ident.hpp"
#include "netident/indirect.hpp"
#include "netident/model.hpp"
#include "netident/oracle.hpp"
#include "netident/synth.hpp"

namespace netident {

inline constexpr int kReportSchemaVersion = 1;

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string model_digest(const NetworkModelSet& model);

nlohmann::json signal_list(const NetworkGraph& graph, const VertexSet& vertices);
nlohmann::json path_list(const NetworkGraph& graph, const PathFamily& family);

nlohmann::json to_json(const IdentVerdict& verdict, const NetworkGraph& graph);
/// {"schema_version", "new_signals": [{"vertex": "w5", "r_index": 4}], "disconnecting_set", "verified", ...}
/// r_index is 1-based like signal names.
nlohmann::json to_json(const AllocationPlan& plan, const NetworkGraph& graph);
nlohmann::json to_json(const GenericRankReport& report);
nlohmann::json to_json(const ModelDiagnostics& diagnostics);
nlohmann::json to_json(const Assumption5Report& report);
nlohmann::json to_json(const IndirectSetup& setup);
/// Complex values as [re, im] pairs.
nlohmann::json complex_json(Complex z);

}  // namespace netident
