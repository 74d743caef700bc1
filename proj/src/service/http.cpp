#include "chatmpc/service/http.hpp"

#include <httplib.h>

#include "chatmpc/error.hpp"
#include "chatmpc/sim/export.hpp"

namespace chatmpc::service {
namespace {

using nlohmann::json;

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  res.status = status;
  res.set_content(json{{"code", code}, {"message", message}}.dump(), "application/json");
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Maps the library's exception taxonomy onto HTTP statuses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const NotFoundError& e) {
      send_error(res, 404, "not_found", e.what());
    } catch (const ConflictError& e) {
      send_error(res, 409, "conflict", e.what());
    } catch (const ValidationError& e) {
      send_error(res, 400, "validation", e.what());
    } catch (const ParseError& e) {
      send_error(res, 400, "validation", e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "validation", std::string("malformed request body: ") + e.what());
    } catch (const RetriableError& e) {
      send_error(res, 503, "unavailable", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) throw ValidationError("request body must not be empty");
  json body = json::parse(req.body);
  if (!body.is_object()) throw ValidationError("request body must be a JSON object");
  return body;
}

std::size_t parse_index(const std::string& text) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    throw ValidationError("trial index must be a nonnegative integer");
  }
  if (pos != text.size()) throw ValidationError("trial index must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

json scenario_json(const sim::Scenario& s) { return json::parse(sim::scenario_to_json(s)); }

json prompt_json(const PromptRecord& r) {
  return {{"prompt", r.prompt},
          {"marker", sim::marker_json(r.marker)},
          {"recognized", r.marker.recognized},
          {"confidence", r.marker.confidence},
          {"theta_before", sim::theta_json(r.theta_before)},
          {"theta_after", sim::theta_json(r.theta_after)}};
}

json trial_json(const std::string& session_id, const TrialRecord& r) {
  return {{"index", r.index},
          {"theta", sim::theta_json(r.theta)},
          {"after_prompts", r.after_prompts},
          {"metrics", sim::metrics_json(r.metrics)},
          {"trajectory", "/sessions/" + session_id + "/trials/" + std::to_string(r.index) + "/trajectory"}};
}

json session_json(const SessionSnapshot& s) {
  json history = json::array();
  for (const auto& t : s.theta_history()) history.push_back(sim::theta_json(t));
  json transcript = json::array();
  for (const auto& p : s.transcript) transcript.push_back(prompt_json(p));
  json trials = json::array();
  for (const auto& t : s.trials) trials.push_back(trial_json(s.id, t));
  return {{"id", s.id},
          {"scenario", scenario_json(s.scenario)},
          {"theta0", sim::theta_json(s.theta0)},
          {"theta", sim::theta_json(s.theta)},
          {"theta_history", history},
          {"transcript", transcript},
          {"trials", trials},
          {"created_at", s.created_at}};
}

void register_routes(httplib::Server& server, SessionService& service, const HttpOptions& options) {
  server.set_default_headers({{"Access-Control-Allow-Origin", options.ui_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});

  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/scenarios", guarded([&service](const httplib::Request&, httplib::Response& res) {
               json out = json::array();
               for (const auto& s : service.scenarios()) out.push_back(scenario_json(s));
               send_json(res, out);
             }));

  server.Post("/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const json body = parse_body(req);
                if (!body.contains("scenario") || !body["scenario"].is_string()) {
                  throw ValidationError("field 'scenario' (string) is required");
                }
                std::optional<ParamVector> theta0;
                if (body.contains("theta0") && !body["theta0"].is_null()) {
                  const auto t = body["theta0"].get<std::vector<double>>();
                  if (t.size() != 2) throw ValidationError("theta0 must have 2 components");
                  theta0 = ParamVector{t[0], t[1]};
                }
                send_json(res, session_json(service.create_session(body["scenario"].get<std::string>(), theta0)),
                          201);
              }));

  server.Get(R"(/sessions/([^/]+))", guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1].str();
               json doc = session_json(service.get_state(id));
               doc["running"] = service.trial_running(id);
               send_json(res, doc);
             }));

  server.Post(R"(/sessions/([^/]+)/prompt)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const json body = parse_body(req);
                if (!body.contains("prompt") || !body["prompt"].is_string()) {
                  throw ValidationError("field 'prompt' (string) is required");
                }
                send_json(res, prompt_json(service.submit_prompt(req.matches[1].str(),
                                                                 body["prompt"].get<std::string>())));
              }));

  server.Post(R"(/sessions/([^/]+)/trial)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1].str();
                send_json(res, trial_json(id, service.run_trial(id)));
              }));

  server.Get(R"(/sessions/([^/]+)/trials/([^/]+)/trajectory)",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const auto traj = service.get_trajectory(req.matches[1].str(), parse_index(req.matches[2].str()));
               if (req.get_param_value("format") == "csv") {
                 res.set_content(sim::trajectory_csv(traj), "text/csv");
               } else {
                 send_json(res, sim::trajectory_json(traj));
               }
             }));
}

}  // namespace chatmpc::service
