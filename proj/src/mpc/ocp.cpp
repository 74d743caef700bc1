#include "chatmpc/mpc/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chatmpc/error.hpp"
#include "chatmpc/kernels/kernels.hpp"
#include "chatmpc/mpc/qp.hpp"

namespace chatmpc::mpc {

std::string_view status_name(OcpStatus status) {
  switch (status) {
    case OcpStatus::Optimal:
      return "optimal";
    case OcpStatus::MaxIter:
      return "max_iter";
    case OcpStatus::SoftenedFeasible:
      return "softened";
    case OcpStatus::Infeasible:
      return "infeasible";
  }
  return "unknown";
}

namespace {

// Condensed problem data for one solve.
class CondensedOcp {
 public:
  CondensedOcp(const PlantModel& model, const State& x0, const CostWeights& w,
               const cbf::BarrierConstraintSet& barriers)
      : x0_(x0), barriers_(barriers), np_(barriers.horizon()), pred_(build_prediction(model, np_)) {
    const Eigen::Index nx = 4 * static_cast<Eigen::Index>(np_);
    Eigen::MatrixXd Qbar = Eigen::MatrixXd::Zero(nx, nx);
    for (int i = 0; i < np_; ++i) Qbar.block<4, 4>(4 * i, 4 * i) = w.Q;
    Qbar.bottomRightCorner<4, 4>() += w.P;
    Eigen::MatrixXd Rbar = Eigen::MatrixXd::Zero(2 * np_, 2 * np_);
    for (int i = 0; i < np_; ++i) Rbar.block<2, 2>(2 * i, 2 * i) = w.R;

    free_ = pred_.Phi * x0;
    const Eigen::MatrixXd QG = Qbar * pred_.Gamma;
    H_ = 2.0 * (pred_.Gamma.transpose() * QG + Rbar);
    H_ = 0.5 * (H_ + H_.transpose()).eval();
    g_ = 2.0 * QG.transpose() * free_;
    c0_ = free_.dot(Qbar * free_);
  }

  int horizon() const { return np_; }
  const Eigen::MatrixXd& H() const { return H_; }
  const Eigen::VectorXd& g() const { return g_; }

  double cost(const Eigen::VectorXd& U) const { return 0.5 * U.dot(H_ * U) + g_.dot(U) + c0_; }

  Eigen::VectorXd states(const Eigen::VectorXd& U) const { return free_ + pred_.Gamma * U; }

  // Row residuals c_r(U) (>= 0 means satisfied) and, optionally, their gradients.
  Eigen::VectorXd barrier_values(const Eigen::VectorXd& U, Eigen::MatrixXd* jacobian) const {
    const auto& obstacles = barriers_.obstacles();
    const std::size_t nobs = obstacles.size();
    const std::size_t npts = static_cast<std::size_t>(np_) + 1;
    Eigen::VectorXd c(static_cast<Eigen::Index>(barriers_.row_count()));
    if (nobs == 0) return c;

    const Eigen::VectorXd X = states(U);
    std::vector<double> px(npts), py(npts), h(npts);
    px[0] = x0_(0);
    py[0] = x0_(1);
    for (std::size_t i = 1; i < npts; ++i) {
      px[i] = X(4 * static_cast<Eigen::Index>(i - 1));
      py[i] = X(4 * static_cast<Eigen::Index>(i - 1) + 1);
    }
    if (jacobian) jacobian->setZero(c.size(), U.size());

    for (std::size_t j = 0; j < nobs; ++j) {
      const auto& obs = obstacles[j];
      kernels::circle_barrier(px, py, obs.center.x(), obs.center.y(), obs.margin * obs.margin, h);
      const double gamma = barriers_.gamma_for(j);
      for (std::size_t i = 0; i + 1 < npts; ++i) {
        const auto r = static_cast<Eigen::Index>(i * nobs + j);
        c(r) = (h[i + 1] - h[i]) + gamma * h[i];
        if (!jacobian) continue;
        // d h(p_{i+1}) / dU  -  (1 - gamma) d h(p_i) / dU; p_0 is fixed.
        const auto next = static_cast<Eigen::Index>(4 * i);
        const Eigen::Vector2d grad_next(2.0 * (px[i + 1] - obs.center.x()), 2.0 * (py[i + 1] - obs.center.y()));
        jacobian->row(r) = grad_next.transpose() * pred_.Gamma.middleRows(next, 2);
        if (i > 0) {
          const auto cur = static_cast<Eigen::Index>(4 * (i - 1));
          const Eigen::Vector2d grad_cur(2.0 * (px[i] - obs.center.x()), 2.0 * (py[i] - obs.center.y()));
          jacobian->row(r) -= (1.0 - gamma) * grad_cur.transpose() * pred_.Gamma.middleRows(cur, 2);
        }
      }
    }
    return c;
  }

 private:
  State x0_;
  const cbf::BarrierConstraintSet& barriers_;
  int np_;
  Prediction pred_;
  Eigen::VectorXd free_;
  Eigen::MatrixXd H_;
  Eigen::VectorXd g_;
  double c0_ = 0.0;
};

double violation(const Eigen::VectorXd& c) {
  double v = 0.0;
  for (Eigen::Index r = 0; r < c.size(); ++r) v += std::max(0.0, -c(r));
  return v;
}

double max_violation(const Eigen::VectorXd& c) {
  double v = 0.0;
  for (Eigen::Index r = 0; r < c.size(); ++r) v = std::max(v, -c(r));
  return v;
}

}  // namespace

OcpSolution solve_ocp(const PlantModel& model, const State& x0, const CostWeights& w,
                      const cbf::BarrierConstraintSet& barriers, const std::optional<InputSeq>& warm,
                      const SqpOptions& opt) {
  if (!all_finite(x0)) throw ContractViolation("initial state must be finite");
  const int np = barriers.horizon();
  const Eigen::Index nu = 2 * np;
  const CondensedOcp ocp(model, x0, w, barriers);
  const Eigen::Index m = static_cast<Eigen::Index>(barriers.row_count());
  const double rho = opt.slack_penalty;
  const double ubound = opt.input_bound;

  Eigen::VectorXd U = Eigen::VectorXd::Zero(nu);
  if (warm) {
    if (warm->size() != static_cast<std::size_t>(np)) {
      throw ContractViolation("warm start length does not match the horizon");
    }
    U = stack(*warm).cwiseMax(-ubound).cwiseMin(ubound);
  }

  // QP in [U; t]: slack t_r >= 0 relaxes barrier row r.
  QpProblem qp;
  qp.H = Eigen::MatrixXd::Zero(nu + m, nu + m);
  qp.H.topLeftCorner(nu, nu) = ocp.H();
  qp.g.resize(nu + m);
  qp.g << ocp.g(), Eigen::VectorXd::Constant(m, rho);
  qp.lb.resize(nu + m);
  qp.ub.resize(nu + m);
  qp.lb << Eigen::VectorXd::Constant(nu, -ubound), Eigen::VectorXd::Zero(m);
  qp.ub << Eigen::VectorXd::Constant(nu, ubound),
      Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
  qp.C = Eigen::MatrixXd::Zero(m, nu + m);
  if (m > 0) qp.C.rightCols(m) = Eigen::MatrixXd::Identity(m, m);
  qp.d.resize(m);

  OcpSolution sol;
  Eigen::MatrixXd J;
  Eigen::VectorXd c = ocp.barrier_values(U, &J);
  double merit = ocp.cost(U) + rho * violation(c);
  sol.merit_trace.push_back(merit);
  bool converged = false;
  bool failed = false;

  for (int it = 0; it < opt.max_iterations; ++it) {
    sol.iterations = it + 1;
    if (m > 0) {
      qp.C.leftCols(nu) = J;
      qp.d = J * U - c;
    }
    const QpResult qr = solve_qp(qp);
    sol.kkt_residual = qr.kkt_residual;
    if (qr.status == QpStatus::NumericalFailure) {
      failed = true;
      break;
    }
    const Eigen::VectorXd Uqp = qr.x.head(nu);
    const Eigen::VectorXd d = Uqp - U;
    const double model_value = ocp.cost(Uqp) + rho * qr.x.tail(m).sum();
    const double predicted = std::max(0.0, merit - model_value);

    if (d.lpNorm<Eigen::Infinity>() <= opt.step_tolerance) {
      converged = true;
      break;
    }

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial;
    Eigen::VectorXd c_trial;
    double merit_trial = merit;
    while (alpha >= 1e-10) {
      trial = (U + alpha * d).cwiseMax(-ubound).cwiseMin(ubound);
      c_trial = ocp.barrier_values(trial, nullptr);
      merit_trial = ocp.cost(trial) + rho * violation(c_trial);
      if (merit_trial <= merit - 1e-4 * alpha * predicted) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // No merit decrease along a direction the model deems useless: stationary.
      converged = predicted <= 1e-9 * (1.0 + std::abs(merit));
      break;
    }
    const double step = (trial - U).lpNorm<Eigen::Infinity>();
    U = trial;
    merit = merit_trial;
    c = ocp.barrier_values(U, &J);
    sol.merit_trace.push_back(merit);
    if (step <= opt.step_tolerance) {
      converged = true;
      break;
    }
  }

  sol.u_seq = unstack_inputs(U);
  sol.x_seq = rollout(model, x0, sol.u_seq);
  sol.cost = evaluate_cost(sol.x_seq, sol.u_seq, w);
  {
    const std::vector<double> res = barriers.residuals(x0, sol.x_seq);
    sol.slack_max = max_violation(Eigen::Map<const Eigen::VectorXd>(res.data(), static_cast<Eigen::Index>(res.size())));
  }
  if (failed) {
    sol.status = OcpStatus::Infeasible;
  } else if (!converged) {
    sol.status = OcpStatus::MaxIter;
  } else if (sol.slack_max > opt.slack_tolerance) {
    sol.status = OcpStatus::SoftenedFeasible;
  } else {
    sol.status = OcpStatus::Optimal;
  }
  return sol;
}

}  // namespace chatmpc::mpc
