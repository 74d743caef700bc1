#pragma once

#include "chatmpc/mpc/plant.hpp"

namespace chatmpc::mpc {

/// Stage cost x'Qx + u'Ru, terminal cost x'Px.
struct CostWeights {
  Eigen::Matrix4d Q;
  Eigen::Matrix2d R;
  Eigen::Matrix4d P;

  /// Q = I4, R = I2, P = 100 I4.
  static CostWeights defaults();

  /// Throws ContractViolation unless every matrix is symmetric PSD.
  void validate() const;
};

/// sum_{i=0}^{Np-1} l(x[i+1], u[i]) + phi(x[Np])
///
/// x_seq[i] holds x(k+i+1|k), so stage i pairs x_seq[i] with u_seq[i].
double evaluate_cost(const StateSeq& x_seq, const InputSeq& u_seq, const CostWeights& w);

}  // namespace chatmpc::mpc
