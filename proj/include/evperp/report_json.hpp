#pragma once

#include <string>

#include <json.hpp>

#include "evperp/adversaries.hpp"
#include "evperp/rents.hpp"
#include "evperp/run.hpp"
#include "evperp/scenario_io.hpp"

namespace evperp {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const RunReport& r, bool include_events = false);
Json to_json(const AttackReport& r);
Json to_json(const CompressionReport& r);
Json to_json(const ThresholdRow& r);

/// Seed-ordered aggregate over repeated runs.
Json run_summary(const std::vector<RunReport>& runs);

/// tick,index,kind,position_id,amount
std::string events_csv(const RunReport& r);

}  // namespace evperp
