#pragma once

#include "mvot/bench.hpp"
#include "mvot/params.hpp"
#include "mvot/security.hpp"
#include "mvot/sources.hpp"

#include <json.hpp>

#include <string>

namespace mvot {

using Json = nlohmann::ordered_json;

// Structured I/O is JSON everywhere except the binary vault container.
// Schemas are versioned by a "schema" field on the top-level documents.

Json params_to_json(const ProtocolParams& params);
ProtocolParams params_from_json(const Json& j);
void write_params_file(const std::string& path, const ProtocolParams& params);
ProtocolParams read_params_file(const std::string& path);

Json population_to_json(const PopulationSpec& spec);
PopulationSpec population_from_json(const Json& j);

Json bench_config_to_json(const BenchConfig& config);
BenchConfig bench_config_from_json(const Json& j);

Json timing_to_json(const TimingBreakdown& timing);
TimingBreakdown timing_from_json(const Json& j);

Json report_to_json(const BenchReport& report);
BenchReport report_from_json(const Json& j);

Json far_to_json(const FarEstimate& est);
Json work_factor_to_json(const WorkFactorReport& report);

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

} // namespace mvot
