#pragma once

#include <Eigen/Dense>
#include <vector>

namespace chatmpc::mpc {

/// [x1, x2, v1, v2]: planar position (m) and velocity (m/s).
using State = Eigen::Vector4d;
/// Acceleration command, each component in [-1, 1] when produced by the solver.
using Input = Eigen::Vector2d;

/// u(k|k) .. u(k+Np-1|k)
using InputSeq = std::vector<Input>;
/// x(k+1|k) .. x(k+Np|k); the measured state is not part of the sequence.
using StateSeq = std::vector<State>;

inline Eigen::Vector2d position(const State& x) { return x.head<2>(); }

/// Discrete-time linear plant x(k+1) = A x(k) + B u(k).
class PlantModel {
 public:
  PlantModel(const Eigen::Matrix4d& A, const Eigen::Matrix<double, 4, 2>& B, double dt);

  /// Accepts dynamically sized matrices and rejects anything but 4x4 / 4x2.
  static PlantModel from_matrices(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double dt);

  /// Planar double integrator sampled at `dt` (the cleaning-robot plant).
  static PlantModel double_integrator(double dt = 0.2);

  const Eigen::Matrix4d& A() const { return A_; }
  const Eigen::Matrix<double, 4, 2>& B() const { return B_; }
  double dt() const { return dt_; }

  State step(const State& x, const Input& u) const { return A_ * x + B_ * u; }

 private:
  Eigen::Matrix4d A_;
  Eigen::Matrix<double, 4, 2> B_;
  double dt_;
};

StateSeq rollout(const PlantModel& model, const State& x0, const InputSeq& u_seq);

/// Stacked prediction X = Phi x0 + Gamma U for a horizon of `horizon` steps.
struct Prediction {
  Eigen::MatrixXd Phi;    // (4 Np) x 4
  Eigen::MatrixXd Gamma;  // (4 Np) x (2 Np)
};

Prediction build_prediction(const PlantModel& model, int horizon);

Eigen::VectorXd stack(const InputSeq& u_seq);
InputSeq unstack_inputs(const Eigen::VectorXd& U);

bool all_finite(const State& x);

}  // namespace chatmpc::mpc
