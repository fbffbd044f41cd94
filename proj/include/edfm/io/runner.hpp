#pragma once

#include "edfm/io/config.hpp"

#include <string>

namespace edfm::io {

/// Snapshot name for a report time: "day_027", or "day_027.50" off whole days.
std::string snapshot_tag(double time);

/// Runs a coupled scenario: initialisation, the schedule, a snapshot at t = 0,
/// every report time and the end, and the run log. Returns the log.
std::vector<coupling::RunLogEntry> run_coupled_scenario(const ScenarioConfig& config);

}  // namespace edfm::io
