#pragma once

#include <json.hpp>
#include <string>

#include "chatmpc/sim/sim.hpp"

namespace chatmpc::sim {

/// Header k,x1,x2,v1,v2,u1,u2,status; one row per applied input, then a final
/// row with the terminal state and empty input fields (status "end").
/// Numbers use 9 significant digits.
std::string trajectory_csv(const Trajectory& trajectory);

nlohmann::json trajectory_json(const Trajectory& trajectory);
nlohmann::json metrics_json(const TrialMetrics& metrics);
nlohmann::json theta_json(const ParamVector& theta);
nlohmann::json marker_json(const interpreter::UpdateMarker& marker);
/// Per-trial summary (prompt, marker, theta before/after, metrics); no trajectories.
nlohmann::json session_summary_json(const SessionLog& log);

}  // namespace chatmpc::sim
