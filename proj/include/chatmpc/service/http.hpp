#pragma once

#include <json.hpp>
#include <string>

#include "chatmpc/service/service.hpp"

namespace httplib {
class Server;
}

namespace chatmpc::service {

struct HttpOptions {
  /// Value of Access-Control-Allow-Origin.
  std::string ui_origin = "*";
};

/// Routes:
///   GET  /scenarios
///   POST /sessions                          {"scenario": name, "theta0"?: [g_vase, g_toy]}
///   GET  /sessions/{id}
///   POST /sessions/{id}/prompt              {"prompt": text}
///   POST /sessions/{id}/trial
///   GET  /sessions/{id}/trials/{n}/trajectory[?format=csv]
/// Errors are {"code", "message"} with a matching HTTP status.
void register_routes(httplib::Server& server, SessionService& service, const HttpOptions& options = {});

nlohmann::json scenario_json(const sim::Scenario& scenario);
nlohmann::json session_json(const SessionSnapshot& snapshot);
nlohmann::json prompt_json(const PromptRecord& record);
nlohmann::json trial_json(const std::string& session_id, const TrialRecord& record);

}  // namespace chatmpc::service
