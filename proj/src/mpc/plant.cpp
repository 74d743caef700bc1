#include "chatmpc/mpc/plant.hpp"

#include <cmath>
#include <string>

#include "chatmpc/error.hpp"

namespace chatmpc::mpc {

PlantModel::PlantModel(const Eigen::Matrix4d& A, const Eigen::Matrix<double, 4, 2>& B, double dt)
    : A_(A), B_(B), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ContractViolation("plant time step must be positive and finite");
  }
  if (!A_.allFinite() || !B_.allFinite()) {
    throw ContractViolation("plant matrices must be finite");
  }
}

PlantModel PlantModel::from_matrices(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double dt) {
  if (A.rows() != 4 || A.cols() != 4) {
    throw ContractViolation("A must be 4x4, got " + std::to_string(A.rows()) + "x" +
                            std::to_string(A.cols()));
  }
  if (B.rows() != 4 || B.cols() != 2) {
    throw ContractViolation("B must be 4x2, got " + std::to_string(B.rows()) + "x" +
                            std::to_string(B.cols()));
  }
  return PlantModel(A, B, dt);
}

PlantModel PlantModel::double_integrator(double dt) {
  Eigen::Matrix4d A = Eigen::Matrix4d::Identity();
  A(0, 2) = dt;
  A(1, 3) = dt;
  Eigen::Matrix<double, 4, 2> B = Eigen::Matrix<double, 4, 2>::Zero();
  B(2, 0) = dt;
  B(3, 1) = dt;
  return PlantModel(A, B, dt);
}

StateSeq rollout(const PlantModel& model, const State& x0, const InputSeq& u_seq) {
  StateSeq out;
  out.reserve(u_seq.size());
  State x = x0;
  for (const auto& u : u_seq) {
    x = model.step(x, u);
    out.push_back(x);
  }
  return out;
}

Prediction build_prediction(const PlantModel& model, int horizon) {
  if (horizon < 1) throw ContractViolation("prediction horizon must be >= 1");
  const Eigen::Index np = horizon;
  Prediction p;
  p.Phi = Eigen::MatrixXd::Zero(4 * np, 4);
  p.Gamma = Eigen::MatrixXd::Zero(4 * np, 2 * np);

  Eigen::Matrix4d Ak = model.A();
  for (Eigen::Index i = 0; i < np; ++i) {
    p.Phi.block<4, 4>(4 * i, 0) = Ak;
    Ak = model.A() * Ak;
  }
  // Gamma(i, k) = A^(i-k) B for k <= i
  for (Eigen::Index i = 0; i < np; ++i) {
    Eigen::Matrix<double, 4, 2> blk = model.B();
    for (Eigen::Index k = i; k >= 0; --k) {
      p.Gamma.block<4, 2>(4 * i, 2 * k) = blk;
      blk = model.A() * blk;
    }
  }
  return p;
}

Eigen::VectorXd stack(const InputSeq& u_seq) {
  Eigen::VectorXd U(2 * static_cast<Eigen::Index>(u_seq.size()));
  for (std::size_t i = 0; i < u_seq.size(); ++i) U.segment<2>(2 * static_cast<Eigen::Index>(i)) = u_seq[i];
  return U;
}

InputSeq unstack_inputs(const Eigen::VectorXd& U) {
  if (U.size() % 2 != 0) throw ContractViolation("stacked input vector has odd length");
  InputSeq out(static_cast<std::size_t>(U.size() / 2));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = U.segment<2>(2 * static_cast<Eigen::Index>(i));
  return out;
}

bool all_finite(const State& x) { return x.allFinite(); }

}  // namespace chatmpc::mpc
