#include "chatmpc/mpc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "chatmpc/error.hpp"

namespace chatmpc::mpc {
namespace {

// All inequalities in the form G x >= h.
struct Inequalities {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  // Row origin: variable index for bounds (sign +1 lower, -1 upper) or -1 for a general row.
  std::vector<Eigen::Index> var;
  std::vector<int> sign;
};

Inequalities assemble(const QpProblem& p) {
  const Eigen::Index n = p.H.rows();
  std::vector<Eigen::Index> var;
  std::vector<int> sign;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(p.lb(i))) {
      var.push_back(i);
      sign.push_back(+1);
    }
    if (std::isfinite(p.ub(i))) {
      var.push_back(i);
      sign.push_back(-1);
    }
  }
  const Eigen::Index nb = static_cast<Eigen::Index>(var.size());
  const Eigen::Index m = nb + p.C.rows();
  Inequalities q;
  q.G = Eigen::MatrixXd::Zero(m, n);
  q.h.resize(m);
  for (Eigen::Index r = 0; r < nb; ++r) {
    const auto i = var[static_cast<std::size_t>(r)];
    if (sign[static_cast<std::size_t>(r)] > 0) {
      q.G(r, i) = 1.0;
      q.h(r) = p.lb(i);
    } else {
      q.G(r, i) = -1.0;
      q.h(r) = -p.ub(i);
    }
  }
  if (p.C.rows() > 0) {
    q.G.bottomRows(p.C.rows()) = p.C;
    q.h.tail(p.C.rows()) = p.d;
  }
  for (Eigen::Index r = 0; r < p.C.rows(); ++r) {
    var.push_back(-1);
    sign.push_back(0);
  }
  q.var = std::move(var);
  q.sign = std::move(sign);
  return q;
}

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

void validate(const QpProblem& p) {
  const Eigen::Index n = p.H.rows();
  if (p.H.cols() != n || p.g.size() != n || p.lb.size() != n || p.ub.size() != n) {
    throw ContractViolation("QP dimensions are inconsistent");
  }
  if (p.C.rows() != p.d.size() || (p.C.rows() > 0 && p.C.cols() != n)) {
    throw ContractViolation("QP constraint matrix dimensions are inconsistent");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.lb(i) > p.ub(i)) throw ContractViolation("QP bounds cross");
  }
}

}  // namespace

QpResult solve_qp(const QpProblem& p, const QpOptions& opt) {
  validate(p);
  const Eigen::Index n = p.H.rows();
  const Inequalities q = assemble(p);
  const Eigen::Index m = q.G.rows();

  QpResult res;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool has_lb = std::isfinite(p.lb(i));
    const bool has_ub = std::isfinite(p.ub(i));
    if (has_lb && has_ub) {
      x(i) = 0.5 * (p.lb(i) + p.ub(i));
    } else if (has_lb) {
      x(i) = std::max(0.0, p.lb(i) + 1.0);
    } else if (has_ub) {
      x(i) = std::min(0.0, p.ub(i) - 1.0);
    }
  }
  Eigen::VectorXd s = (q.G * x - q.h).cwiseMax(1.0);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(m);

  const double scale = 1.0 + std::max(p.g.lpNorm<Eigen::Infinity>(),
                                      m > 0 ? q.h.lpNorm<Eigen::Infinity>() : 0.0);
  res.status = QpStatus::MaxIterations;

  Eigen::MatrixXd K(n, n);
  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it + 1;
    const Eigen::VectorXd rd = p.H * x + p.g - q.G.transpose() * z;
    const Eigen::VectorXd rp = q.G * x - s - q.h;
    const double mu = m > 0 ? s.dot(z) / static_cast<double>(m) : 0.0;

    if (rd.lpNorm<Eigen::Infinity>() <= opt.tolerance * scale &&
        (m == 0 || (rp.lpNorm<Eigen::Infinity>() <= opt.tolerance * scale && mu <= opt.tolerance))) {
      res.status = QpStatus::Solved;
      break;
    }

    const Eigen::VectorXd w = z.cwiseQuotient(s);
    K = p.H;
    K.noalias() += q.G.transpose() * w.asDiagonal() * q.G;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    const bool use_llt = llt.info() == Eigen::Success;
    if (!use_llt) {
      ldlt.compute(K);
      if (ldlt.info() != Eigen::Success) {
        res.status = QpStatus::NumericalFailure;
        break;
      }
    }
    auto solve = [&](const Eigen::VectorXd& rc) {
      // (H + G'WG) dx = -rd - G' S^-1 (rc + Z rp)
      const Eigen::VectorXd rhs = -rd - q.G.transpose() * (rc + z.cwiseProduct(rp)).cwiseQuotient(s);
      Eigen::VectorXd dx = use_llt ? Eigen::VectorXd(llt.solve(rhs)) : Eigen::VectorXd(ldlt.solve(rhs));
      Eigen::VectorXd ds = q.G * dx + rp;
      Eigen::VectorXd dz = -(rc + z.cwiseProduct(ds)).cwiseQuotient(s);
      return std::tuple{std::move(dx), std::move(ds), std::move(dz)};
    };

    if (m == 0) {
      auto [dx, ds, dz] = solve(Eigen::VectorXd());
      x += dx;
      continue;
    }

    // predictor
    const Eigen::VectorXd rc_aff = s.cwiseProduct(z);
    auto [dx_a, ds_a, dz_a] = solve(rc_aff);
    const double a_aff = std::min(max_step(s, ds_a), max_step(z, dz_a));
    const double mu_aff = (s + a_aff * ds_a).dot(z + a_aff * dz_a) / static_cast<double>(m);
    const double sigma = std::pow(mu_aff / mu, 3);

    // corrector
    const Eigen::VectorXd rc =
        s.cwiseProduct(z) + ds_a.cwiseProduct(dz_a) - Eigen::VectorXd::Constant(m, sigma * mu);
    auto [dx, ds, dz] = solve(rc);
    const double alpha = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));
    x += alpha * dx;
    s += alpha * ds;
    z += alpha * dz;

    if (!x.allFinite() || !s.allFinite() || !z.allFinite()) {
      res.status = QpStatus::NumericalFailure;
      break;
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) x(i) = std::clamp(x(i), p.lb(i), p.ub(i));

  res.x = x;
  res.objective = 0.5 * x.dot(p.H * x) + p.g.dot(x);
  res.row_multipliers = z.tail(p.C.rows());
  res.bound_multipliers = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto i = q.var[static_cast<std::size_t>(r)];
    if (i >= 0) res.bound_multipliers(i) += q.sign[static_cast<std::size_t>(r)] * z(r);
  }

  const Eigen::VectorXd slack = q.G * x - q.h;
  const double stationarity = (p.H * x + p.g - q.G.transpose() * z).lpNorm<Eigen::Infinity>();
  double infeasibility = 0.0;
  double complementarity = 0.0;
  for (Eigen::Index r = 0; r < m; ++r) {
    infeasibility = std::max(infeasibility, -slack(r));
    complementarity = std::max(complementarity, std::abs(slack(r) * z(r)));
  }
  res.kkt_residual = std::max({stationarity, infeasibility, complementarity});
  return res;
}

}  // namespace chatmpc::mpc
