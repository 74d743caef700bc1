#include "chatmpc/mpc/controller.hpp"

#include "chatmpc/error.hpp"

namespace chatmpc::mpc {

MpcController::MpcController(ControllerConfig config, std::vector<cbf::Obstacle> obstacles, ParamVector theta)
    : config_(std::move(config)),
      obstacles_(std::move(obstacles)),
      theta_(theta),
      barriers_(cbf::build_constraints(obstacles_, theta_, config_.horizon)) {
  config_.weights.validate();
}

void MpcController::set_theta(const ParamVector& theta) {
  barriers_ = cbf::build_constraints(obstacles_, theta, config_.horizon);
  theta_ = theta;
}

ControlStep MpcController::step(const State& x_measured) {
  if (!all_finite(x_measured)) throw ContractViolation("measured state must be finite");
  ControlStep out;
  out.solution = solve_ocp(config_.model, x_measured, config_.weights, barriers_,
                           config_.warm_start ? warm_ : std::nullopt, config_.sqp);
  out.u = out.solution.u_seq.front();
  if (out.solution.status == OcpStatus::Infeasible) {
    warm_.reset();
  } else {
    warm_ = shift_inputs(out.solution.u_seq);
  }
  return out;
}

InputSeq shift_inputs(const InputSeq& u_seq) {
  if (u_seq.empty()) return {};
  InputSeq out(u_seq.begin() + 1, u_seq.end());
  out.push_back(u_seq.back());
  return out;
}

}  // namespace chatmpc::mpc
