#pragma once

// Checks shared by the unit and acceptance suites. Each returns an empty
// string when the property holds and a description of the failure otherwise.

#include <cmath>
#include <sstream>
#include <string>

#include "chatmpc/cbf/barrier.hpp"
#include "chatmpc/mpc/ocp.hpp"

namespace chatmpc::testing {

inline std::string rollout_consistency(const mpc::PlantModel& model, const mpc::State& x0,
                                       const mpc::OcpSolution& sol, double tol = 1e-9) {
  const auto xs = mpc::rollout(model, x0, sol.u_seq);
  if (xs.size() != sol.x_seq.size()) return "rollout length mismatch";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double err = (xs[i] - sol.x_seq[i]).cwiseAbs().maxCoeff();
    if (!(err <= tol)) {
      std::ostringstream os;
      os << "rollout residual " << err << " at step " << i;
      return os.str();
    }
  }
  return {};
}

inline std::string box_feasibility(const mpc::OcpSolution& sol, double bound = 1.0) {
  for (std::size_t i = 0; i < sol.u_seq.size(); ++i) {
    for (int c = 0; c < 2; ++c) {
      const double u = sol.u_seq[i](c);
      if (!(u >= -bound && u <= bound)) {
        std::ostringstream os;
        os << "input " << i << "/" << c << " = " << u << " outside the box";
        return os.str();
      }
    }
  }
  return {};
}

inline std::string barrier_feasibility(const cbf::BarrierConstraintSet& set, const mpc::State& x0,
                                       const mpc::OcpSolution& sol, double tol = 1e-6) {
  if (sol.status != mpc::OcpStatus::Optimal) return {};
  const auto res = set.residuals(x0, sol.x_seq);
  for (std::size_t r = 0; r < res.size(); ++r) {
    if (!(res[r] >= -tol)) {
      std::ostringstream os;
      os << "barrier row " << r << " residual " << res[r];
      return os.str();
    }
  }
  return {};
}

inline std::string merit_monotone(const mpc::OcpSolution& sol) {
  for (std::size_t i = 1; i < sol.merit_trace.size(); ++i) {
    if (sol.merit_trace[i] > sol.merit_trace[i - 1]) {
      std::ostringstream os;
      os << "merit increased at iterate " << i << ": " << sol.merit_trace[i - 1] << " -> " << sol.merit_trace[i];
      return os.str();
    }
  }
  return {};
}

inline std::string cost_consistency(const mpc::OcpSolution& sol, const mpc::CostWeights& w, double tol = 1e-8) {
  const double c = mpc::evaluate_cost(sol.x_seq, sol.u_seq, w);
  if (!(std::abs(c - sol.cost) <= tol)) return "reported cost differs from evaluate_cost";
  return {};
}

/// Every per-solve invariant at once.
inline std::string all_solution_invariants(const mpc::PlantModel& model, const mpc::CostWeights& w,
                                           const cbf::BarrierConstraintSet& set, const mpc::State& x0,
                                           const mpc::OcpSolution& sol) {
  for (auto msg : {rollout_consistency(model, x0, sol), box_feasibility(sol), barrier_feasibility(set, x0, sol),
                   merit_monotone(sol), cost_consistency(sol, w)}) {
    if (!msg.empty()) return msg;
  }
  if (sol.status == mpc::OcpStatus::Optimal && !(sol.slack_max <= 1e-6)) return "optimal with slack";
  if (sol.status != mpc::OcpStatus::Infeasible && !(sol.kkt_residual <= 1e-6)) {
    std::ostringstream os;
    os << "subproblem KKT residual " << sol.kkt_residual;
    return os.str();
  }
  return {};
}

}  // namespace chatmpc::testing
