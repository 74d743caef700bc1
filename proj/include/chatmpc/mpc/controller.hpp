#pragma once

#include <optional>
#include <vector>

#include "chatmpc/cbf/barrier.hpp"
#include "chatmpc/mpc/ocp.hpp"
#include "chatmpc/params.hpp"

namespace chatmpc::mpc {

struct ControllerConfig {
  PlantModel model = PlantModel::double_integrator(0.2);
  CostWeights weights = CostWeights::defaults();
  int horizon = 8;
  SqpOptions sqp;
  bool warm_start = true;
};

struct ControlStep {
  Input u;
  OcpSolution solution;
};

/// Receding-horizon controller: solve, apply the first input, keep the
/// shifted remainder as the next warm start.
class MpcController {
 public:
  MpcController(ControllerConfig config, std::vector<cbf::Obstacle> obstacles, ParamVector theta);

  /// An Infeasible solve is returned as-is (u is the first element of the
  /// returned sequence) and clears the warm start; the caller picks a fallback.
  ControlStep step(const State& x_measured);

  void set_theta(const ParamVector& theta);
  const ParamVector& theta() const { return theta_; }
  const ControllerConfig& config() const { return config_; }
  const std::optional<InputSeq>& warm_start() const { return warm_; }
  void reset() { warm_.reset(); }

 private:
  ControllerConfig config_;
  std::vector<cbf::Obstacle> obstacles_;
  ParamVector theta_;
  cbf::BarrierConstraintSet barriers_;
  std::optional<InputSeq> warm_;
};

/// Drop the first input and repeat the last one.
InputSeq shift_inputs(const InputSeq& u_seq);

}  // namespace chatmpc::mpc
