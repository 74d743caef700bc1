#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "chatmpc/cbf/barrier.hpp"
#include "chatmpc/mpc/plant.hpp"

namespace chatmpc::sim {

struct Scenario {
  std::string name;
  std::vector<cbf::Obstacle> obstacles;
  mpc::State x0 = mpc::State::Zero();
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  double goal_tol = 0.1;
  int max_steps = 600;

  /// Throws ValidationError naming the violated invariant.
  void validate() const;
};

/// {name, obstacles: [{kind, center: [x, y], margin}], x0: [4], goal_tol?, max_steps?}
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario_file(const std::string& path);
std::string scenario_to_json(const Scenario& s);

/// "env_a" and "env_b".
std::vector<std::string> builtin_scenario_names();
bool is_builtin_scenario(std::string_view name);
Scenario builtin_scenario(std::string_view name);

/// Builtin name or path to a scenario document.
Scenario load_scenario(const std::string& source);

}  // namespace chatmpc::sim
