#pragma once

#include "iplr/outer.hpp"

#include <json.hpp>

namespace iplr {

inline constexpr int kReportSchemaVersion = 1;

const char* to_string(InnerMethod method);

nlohmann::json config_to_json(const SolverConfig& cfg, double eta2);

/// Full solve report. Wall-clock fields are left out when include_timings is
/// false so that repeated runs serialize identically.
nlohmann::json report_to_json(const SdpProblem& problem, const SolverConfig& cfg, const SolveReport& report,
                              bool include_timings);

}  // namespace iplr
