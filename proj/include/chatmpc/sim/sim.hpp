#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chatmpc/interpreter/interpreter.hpp"
#include "chatmpc/mpc/controller.hpp"
#include "chatmpc/sim/scenario.hpp"

namespace chatmpc::sim {

struct Trajectory {
  double dt = 0.2;
  /// x(0) .. x(K); one more entry than `inputs`.
  std::vector<mpc::State> states;
  /// Input applied at step k (zero on a fallback step).
  std::vector<mpc::Input> inputs;
  std::vector<mpc::OcpStatus> statuses;
  /// SQP iterations spent at each step.
  std::vector<int> iterations;

  std::size_t steps() const { return inputs.size(); }
  bool operator==(const Trajectory&) const = default;
};

struct TrialMetrics {
  bool reached_goal = false;
  int steps = 0;
  /// min over time of (distance to center - R), over obstacles of each kind present.
  std::map<cbf::ObstacleKind, double> min_clearance_by_kind;
  /// min over time of h, per obstacle in scenario order.
  std::vector<double> min_h_by_obstacle;
  /// Steps where the solver reported Infeasible and zero input was applied.
  int infeasible_steps = 0;
  int softened_steps = 0;
  int max_iter_steps = 0;

  bool operator==(const TrialMetrics&) const = default;
};

struct TrialResult {
  Trajectory trajectory;
  TrialMetrics metrics;
  bool operator==(const TrialResult&) const = default;
};

/// Minima over every recorded state. Throws ContractViolation on an empty trajectory.
TrialMetrics compute_metrics(const Trajectory& trajectory, const Scenario& scenario);

/// Called with the measured state and the solver output of every control step.
using SolveObserver = std::function<void(const mpc::State&, const mpc::OcpSolution&)>;

/// Closed loop with the prediction model as plant, until the position is
/// within goal_tol of the goal or max_steps inputs have been applied.
/// Infeasible steps apply zero input and are counted in the metrics.
TrialResult run_trial(const Scenario& scenario, const ParamVector& theta,
                      const mpc::ControllerConfig& config = {}, const SolveObserver& observer = {});

struct SessionEntry {
  std::optional<std::string> prompt;
  interpreter::UpdateMarker marker;
  ParamVector theta_before;
  ParamVector theta_after;
  Trajectory trajectory;
  TrialMetrics metrics;

  bool operator==(const SessionEntry&) const = default;
};

struct SessionLog {
  std::string scenario;
  std::vector<SessionEntry> entries;

  /// Parameter used by each trial, in order.
  std::vector<ParamVector> theta_history() const;
  bool operator==(const SessionLog&) const = default;
};

/// std::nullopt entries run a trial without a prompt.
using PromptSchedule = std::vector<std::optional<std::string>>;

/// The three-trial protocol: no prompt, "Separate from the vase.",
/// "You don't have to be so careful about the toy."
PromptSchedule table2_schedule();

SessionLog run_session(const Scenario& scenario, const PromptSchedule& schedule,
                       const interpreter::Interpreter& interpreter, const ParamVector& theta0,
                       const mpc::ControllerConfig& config = {}, const SolveObserver& observer = {});

}  // namespace chatmpc::sim
