#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "chatmpc/cbf/barrier.hpp"
#include "chatmpc/mpc/cost.hpp"
#include "chatmpc/mpc/plant.hpp"

namespace chatmpc::mpc {

enum class OcpStatus { Optimal, MaxIter, SoftenedFeasible, Infeasible };

std::string_view status_name(OcpStatus status);

struct SqpOptions {
  int max_iterations = 30;
  double step_tolerance = 1e-8;
  /// Linear penalty on each barrier slack, in the subproblem and in the merit function.
  double slack_penalty = 1e4;
  /// Largest barrier violation still reported as Optimal.
  double slack_tolerance = 1e-6;
  double input_bound = 1.0;
};

struct OcpSolution {
  InputSeq u_seq;
  StateSeq x_seq;
  double cost = 0.0;
  OcpStatus status = OcpStatus::Infeasible;
  /// Largest violation of the (nonlinear) barrier rows at the returned inputs.
  double slack_max = 0.0;
  int iterations = 0;
  /// KKT residual of the last convex subproblem.
  double kkt_residual = 0.0;
  /// Merit (cost + penalty * violation) of every accepted iterate, starting point first.
  std::vector<double> merit_trace;

  bool operator==(const OcpSolution&) const = default;
};

/// Solves the barrier-constrained finite-horizon problem by sequential convex
/// programming: each iteration linearizes the barrier rows about the current
/// input sequence and solves the resulting QP (dynamics condensed, input box
/// as bounds, one penalized slack per barrier row), followed by a backtracking
/// line search on the L1 merit function.
///
/// `warm` is projected onto the input box; an absent warm start means zeros.
OcpSolution solve_ocp(const PlantModel& model, const State& x0, const CostWeights& w,
                      const cbf::BarrierConstraintSet& barriers,
                      const std::optional<InputSeq>& warm = std::nullopt, const SqpOptions& options = {});

}  // namespace chatmpc::mpc
