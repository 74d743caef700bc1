#pragma once

#include <Eigen/Dense>

namespace chatmpc::mpc {

/// min 0.5 x'Hx + g'x  s.t.  lb <= x <= ub,  C x >= d
///
/// H must be symmetric PSD; infinite bounds are allowed.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
};

enum class QpStatus { Solved, MaxIterations, NumericalFailure };

struct QpOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
};

struct QpResult {
  Eigen::VectorXd x;
  /// Multipliers of the general rows C x >= d (nonnegative).
  Eigen::VectorXd row_multipliers;
  /// lower-bound multiplier minus upper-bound multiplier, per variable.
  Eigen::VectorXd bound_multipliers;
  double objective = 0.0;
  /// max of stationarity, primal infeasibility and complementarity at x (inf-norms).
  double kkt_residual = 0.0;
  int iterations = 0;
  QpStatus status = QpStatus::NumericalFailure;
};

/// Mehrotra predictor-corrector interior point method on the dense KKT system.
/// The returned x is projected onto [lb, ub] so bounds hold exactly.
QpResult solve_qp(const QpProblem& problem, const QpOptions& options = {});

}  // namespace chatmpc::mpc
