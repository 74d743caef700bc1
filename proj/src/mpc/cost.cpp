#include "chatmpc/mpc/cost.hpp"

#include <Eigen/Eigenvalues>
#include <string>

#include "chatmpc/error.hpp"

namespace chatmpc::mpc {
namespace {

template <typename M>
void require_psd(const M& m, const char* name) {
  if (!m.allFinite()) throw ContractViolation(std::string(name) + " must be finite");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
    throw ContractViolation(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<M> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw ContractViolation(std::string(name) + " must be positive semidefinite");
  }
}

}  // namespace

CostWeights CostWeights::defaults() {
  return {Eigen::Matrix4d::Identity(), Eigen::Matrix2d::Identity(), 100.0 * Eigen::Matrix4d::Identity()};
}

void CostWeights::validate() const {
  require_psd(Q, "Q");
  require_psd(R, "R");
  require_psd(P, "P");
}

double evaluate_cost(const StateSeq& x_seq, const InputSeq& u_seq, const CostWeights& w) {
  if (x_seq.size() != u_seq.size()) {
    throw ContractViolation("state and input sequences differ in length: " +
                            std::to_string(x_seq.size()) + " vs " + std::to_string(u_seq.size()));
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < x_seq.size(); ++i) {
    cost += x_seq[i].dot(w.Q * x_seq[i]) + u_seq[i].dot(w.R * u_seq[i]);
  }
  if (!x_seq.empty()) cost += x_seq.back().dot(w.P * x_seq.back());
  return cost;
}

}  // namespace chatmpc::mpc
