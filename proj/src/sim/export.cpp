#include "chatmpc/sim/export.hpp"

#include <cstdio>

namespace chatmpc::sim {
namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "k,x1,x2,v1,v2,u1,u2,status\n";
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    const auto& x = t.states[k];
    out += std::to_string(k);
    for (int i = 0; i < 4; ++i) out += "," + num(x(i));
    if (k < t.inputs.size()) {
      out += "," + num(t.inputs[k](0)) + "," + num(t.inputs[k](1)) + "," +
             std::string(mpc::status_name(t.statuses[k]));
    } else {
      out += ",,,end";
    }
    out += '\n';
  }
  return out;
}

nlohmann::json trajectory_json(const Trajectory& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    const auto& x = t.states[k];
    nlohmann::json row = {{"k", k}, {"x", {x(0), x(1), x(2), x(3)}}};
    if (k < t.inputs.size()) {
      row["u"] = {t.inputs[k](0), t.inputs[k](1)};
      row["status"] = std::string(mpc::status_name(t.statuses[k]));
    } else {
      row["u"] = nullptr;
      row["status"] = "end";
    }
    rows.push_back(std::move(row));
  }
  return {{"dt", t.dt}, {"steps", t.steps()}, {"rows", rows}};
}

nlohmann::json metrics_json(const TrialMetrics& m) {
  nlohmann::json clearance = nlohmann::json::object();
  for (const auto& [kind, c] : m.min_clearance_by_kind) clearance[std::string(cbf::kind_name(kind))] = c;
  return {{"reached_goal", m.reached_goal},
          {"steps", m.steps},
          {"min_clearance_by_kind", clearance},
          {"min_h_by_obstacle", m.min_h_by_obstacle},
          {"infeasible_steps", m.infeasible_steps},
          {"softened_steps", m.softened_steps},
          {"max_iter_steps", m.max_iter_steps}};
}

nlohmann::json theta_json(const ParamVector& theta) { return {theta.gamma_vase, theta.gamma_toy}; }

nlohmann::json marker_json(const interpreter::UpdateMarker& marker) {
  return {{"s", {marker.s[0], marker.s[1]}}, {"confidence", marker.confidence}, {"recognized", marker.recognized}};
}

nlohmann::json session_summary_json(const SessionLog& log) {
  nlohmann::json trials = nlohmann::json::array();
  for (std::size_t i = 0; i < log.entries.size(); ++i) {
    const auto& e = log.entries[i];
    trials.push_back({{"trial", i + 1},
                      {"prompt", e.prompt ? nlohmann::json(*e.prompt) : nlohmann::json(nullptr)},
                      {"marker", e.prompt ? marker_json(e.marker) : nlohmann::json(nullptr)},
                      {"theta_before", theta_json(e.theta_before)},
                      {"theta_after", theta_json(e.theta_after)},
                      {"metrics", metrics_json(e.metrics)}});
  }
  return {{"scenario", log.scenario}, {"trials", trials}};
}

}  // namespace chatmpc::sim
