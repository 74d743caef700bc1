#include "chatmpc/sim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chatmpc/error.hpp"
#include "chatmpc/kernels/kernels.hpp"

namespace chatmpc::sim {
namespace {

bool at_goal(const mpc::State& x, const Scenario& s) { return (mpc::position(x) - s.goal).norm() <= s.goal_tol; }

}  // namespace

TrialMetrics compute_metrics(const Trajectory& trajectory, const Scenario& scenario) {
  if (trajectory.states.empty()) throw ContractViolation("trajectory has no states");
  TrialMetrics m;
  m.steps = static_cast<int>(trajectory.steps());
  m.reached_goal = at_goal(trajectory.states.back(), scenario);

  const std::size_t n = trajectory.states.size();
  std::vector<double> px(n), py(n), h(n);
  for (std::size_t k = 0; k < n; ++k) {
    px[k] = trajectory.states[k](0);
    py[k] = trajectory.states[k](1);
  }
  for (const auto& obs : scenario.obstacles) {
    kernels::circle_barrier(px, py, obs.center.x(), obs.center.y(), obs.margin * obs.margin, h);
    const auto kmin = std::min_element(h.begin(), h.end()) - h.begin();
    m.min_h_by_obstacle.push_back(h[static_cast<std::size_t>(kmin)]);
    // h is monotone in distance, so the minimizing state also minimizes clearance
    const double clearance =
        std::hypot(px[static_cast<std::size_t>(kmin)] - obs.center.x(), py[static_cast<std::size_t>(kmin)] - obs.center.y()) -
        obs.margin;
    auto [it, inserted] = m.min_clearance_by_kind.try_emplace(obs.kind, clearance);
    if (!inserted) it->second = std::min(it->second, clearance);
  }
  for (auto st : trajectory.statuses) {
    if (st == mpc::OcpStatus::Infeasible) ++m.infeasible_steps;
    if (st == mpc::OcpStatus::SoftenedFeasible) ++m.softened_steps;
    if (st == mpc::OcpStatus::MaxIter) ++m.max_iter_steps;
  }
  return m;
}

TrialResult run_trial(const Scenario& scenario, const ParamVector& theta, const mpc::ControllerConfig& config,
                      const SolveObserver& observer) {
  scenario.validate();
  mpc::MpcController controller(config, scenario.obstacles, theta);
  TrialResult out;
  Trajectory& traj = out.trajectory;
  traj.dt = config.model.dt();
  mpc::State x = scenario.x0;
  traj.states.push_back(x);

  while (!at_goal(x, scenario) && static_cast<int>(traj.inputs.size()) < scenario.max_steps) {
    const mpc::ControlStep step = controller.step(x);
    if (observer) observer(x, step.solution);
    mpc::Input u = step.u;
    if (step.solution.status == mpc::OcpStatus::Infeasible) u = mpc::Input::Zero();
    x = config.model.step(x, u);
    traj.inputs.push_back(u);
    traj.statuses.push_back(step.solution.status);
    traj.iterations.push_back(step.solution.iterations);
    traj.states.push_back(x);
  }
  out.metrics = compute_metrics(traj, scenario);
  return out;
}

std::vector<ParamVector> SessionLog::theta_history() const {
  std::vector<ParamVector> out;
  for (const auto& e : entries) out.push_back(e.theta_after);
  return out;
}

PromptSchedule table2_schedule() {
  return {std::nullopt, std::string("Separate from the vase."),
          std::string("You don't have to be so careful about the toy.")};
}

SessionLog run_session(const Scenario& scenario, const PromptSchedule& schedule,
                       const interpreter::Interpreter& interpreter, const ParamVector& theta0,
                       const mpc::ControllerConfig& config, const SolveObserver& observer) {
  scenario.validate();
  SessionLog log;
  log.scenario = scenario.name;
  ParamVector theta = theta0;
  for (const auto& prompt : schedule) {
    SessionEntry entry;
    entry.prompt = prompt;
    entry.theta_before = theta;
    if (prompt) {
      const auto result = interpreter.interpret(*prompt, theta);
      entry.marker = result.marker;
      theta = result.theta_after;
    }
    entry.theta_after = theta;
    TrialResult trial = run_trial(scenario, theta, config, observer);
    entry.trajectory = std::move(trial.trajectory);
    entry.metrics = std::move(trial.metrics);
    log.entries.push_back(std::move(entry));
  }
  return log;
}

}  // namespace chatmpc::sim
