#include "chatmpc/sim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "chatmpc/error.hpp"

namespace chatmpc::sim {
namespace {

using nlohmann::json;

constexpr std::string_view kEnvA = R"({
  "name": "env_a",
  "obstacles": [
    {"kind": "vase", "center": [-1.0, -3.0], "margin": 0.5},
    {"kind": "toy", "center": [-3.0, -1.0], "margin": 0.5}
  ],
  "x0": [-5.0, -5.0, 0.0, 0.0],
  "goal_tol": 0.1,
  "max_steps": 600
})";

constexpr std::string_view kEnvB = R"({
  "name": "env_b",
  "obstacles": [
    {"kind": "vase", "center": [-1.0, -4.0], "margin": 0.5},
    {"kind": "vase", "center": [-1.0, -2.0], "margin": 0.5},
    {"kind": "toy", "center": [1.5, -3.0], "margin": 0.5}
  ],
  "x0": [0.0, -10.0, 0.0, 0.0],
  "goal_tol": 0.1,
  "max_steps": 600
})";

}  // namespace

void Scenario::validate() const {
  if (name.empty()) throw ValidationError("scenario name must not be empty");
  if (!x0.allFinite()) throw ValidationError("x0 must be finite");
  if (!(goal_tol > 0.0) || !std::isfinite(goal_tol)) throw ValidationError("goal_tol must be positive");
  if (max_steps < 0) throw ValidationError("max_steps must be nonnegative");
  for (std::size_t j = 0; j < obstacles.size(); ++j) {
    const auto& obs = obstacles[j];
    if (cbf::h_value(obs, mpc::position(x0)) < 0.0) {
      throw ValidationError("x0 lies inside the safety margin of obstacle " + std::to_string(j) + " (" +
                            std::string(cbf::kind_name(obs.kind)) + ")");
    }
    if (cbf::h_value(obs, goal) <= 0.0) {
      throw ValidationError("goal lies inside the safety margin of obstacle " + std::to_string(j));
    }
  }
}

Scenario parse_scenario(std::string_view json_text) {
  Scenario s;
  try {
    const json doc = json::parse(json_text);
    s.name = doc.at("name").get<std::string>();
    for (const auto& o : doc.at("obstacles")) {
      const auto center = o.at("center").get<std::vector<double>>();
      if (center.size() != 2) throw ParseError("obstacle center must have 2 components");
      const double margin = o.at("margin").get<double>();
      if (!(margin > 0.0)) throw ValidationError("obstacle margin must be positive");
      s.obstacles.emplace_back(cbf::parse_kind(o.at("kind").get<std::string>()),
                               Eigen::Vector2d(center[0], center[1]), margin);
    }
    const auto x0 = doc.at("x0").get<std::vector<double>>();
    if (x0.size() != 4) throw ParseError("x0 must have 4 components");
    s.x0 = mpc::State(x0[0], x0[1], x0[2], x0[3]);
    if (doc.contains("goal_tol")) s.goal_tol = doc.at("goal_tol").get<double>();
    if (doc.contains("max_steps")) s.max_steps = doc.at("max_steps").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario document: ") + e.what());
  } catch (const ContractViolation& e) {
    throw ValidationError(e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  json obstacles = json::array();
  for (const auto& o : s.obstacles) {
    obstacles.push_back({{"kind", std::string(cbf::kind_name(o.kind))},
                         {"center", {o.center.x(), o.center.y()}},
                         {"margin", o.margin}});
  }
  const json doc = {{"name", s.name},
                    {"obstacles", obstacles},
                    {"x0", {s.x0(0), s.x0(1), s.x0(2), s.x0(3)}},
                    {"goal", {s.goal.x(), s.goal.y()}},
                    {"goal_tol", s.goal_tol},
                    {"max_steps", s.max_steps}};
  return doc.dump(2);
}

std::vector<std::string> builtin_scenario_names() { return {"env_a", "env_b"}; }

bool is_builtin_scenario(std::string_view name) { return name == "env_a" || name == "env_b"; }

Scenario builtin_scenario(std::string_view name) {
  if (name == "env_a") return parse_scenario(kEnvA);
  if (name == "env_b") return parse_scenario(kEnvB);
  throw NotFoundError("unknown scenario '" + std::string(name) + "'");
}

Scenario load_scenario(const std::string& source) {
  if (is_builtin_scenario(source)) return builtin_scenario(source);
  return load_scenario_file(source);
}

}  // namespace chatmpc::sim
