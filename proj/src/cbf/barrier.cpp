#include "chatmpc/cbf/barrier.hpp"

#include <cmath>

#include "chatmpc/error.hpp"
#include "chatmpc/kernels/kernels.hpp"

namespace chatmpc::cbf {

std::string_view kind_name(ObstacleKind kind) {
  switch (kind) {
    case ObstacleKind::Vase:
      return "vase";
    case ObstacleKind::Toy:
      return "toy";
  }
  throw ContractViolation("unknown obstacle kind");
}

ObstacleKind parse_kind(std::string_view name) {
  if (name == "vase") return ObstacleKind::Vase;
  if (name == "toy") return ObstacleKind::Toy;
  throw ParseError("unknown obstacle kind '" + std::string(name) + "'");
}

Obstacle::Obstacle(ObstacleKind kind_, Eigen::Vector2d center_, double margin_)
    : kind(kind_), center(std::move(center_)), margin(margin_) {
  if (!(margin > 0.0) || !std::isfinite(margin)) {
    throw ContractViolation("obstacle margin must be positive and finite");
  }
  if (!center.allFinite()) throw ContractViolation("obstacle center must be finite");
}

double h_value(const Obstacle& obs, const Eigen::Vector2d& pos) {
  const double dx = pos.x() - obs.center.x();
  const double dy = pos.y() - obs.center.y();
  return (dx * dx + dy * dy) - obs.margin * obs.margin;
}

double barrier_residual(const Obstacle& obs, double gamma, const mpc::State& x_i,
                        const mpc::State& x_next) {
  if (!(gamma > 0.0)) throw ContractViolation("barrier gamma must be positive");
  const double h = h_value(obs, mpc::position(x_i));
  const double dh = h_value(obs, mpc::position(x_next)) - h;
  return dh + gamma * h;
}

BarrierConstraintSet::BarrierConstraintSet(std::vector<Obstacle> obstacles,
                                           std::map<ObstacleKind, double> gamma_by_kind, int horizon)
    : obstacles_(std::move(obstacles)), gamma_by_kind_(std::move(gamma_by_kind)), horizon_(horizon) {
  if (horizon_ < 1) throw ContractViolation("barrier horizon must be >= 1");
  for (const auto& [kind, gamma] : gamma_by_kind_) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw ContractViolation("gamma for " + std::string(kind_name(kind)) + " must be positive");
    }
  }
  for (const auto& obs : obstacles_) {
    if (!gamma_by_kind_.contains(obs.kind)) {
      throw ContractViolation("no gamma configured for obstacle kind " + std::string(kind_name(obs.kind)));
    }
  }
}

double BarrierConstraintSet::gamma_for(std::size_t obstacle) const {
  return gamma_by_kind_.at(obstacles_.at(obstacle).kind);
}

std::vector<BarrierRow> BarrierConstraintSet::rows() const {
  std::vector<BarrierRow> out;
  out.reserve(row_count());
  for (int i = 0; i < horizon_; ++i) {
    for (std::size_t j = 0; j < obstacles_.size(); ++j) {
      out.push_back({static_cast<std::size_t>(i), j, gamma_for(j)});
    }
  }
  return out;
}

std::vector<double> BarrierConstraintSet::residuals(const mpc::State& x0, const mpc::StateSeq& x_seq) const {
  if (x_seq.size() != static_cast<std::size_t>(horizon_)) {
    throw ContractViolation("predicted sequence length does not match barrier horizon");
  }
  const std::size_t n = x_seq.size() + 1;
  std::vector<double> px(n), py(n), h(n);
  px[0] = x0(0);
  py[0] = x0(1);
  for (std::size_t i = 0; i < x_seq.size(); ++i) {
    px[i + 1] = x_seq[i](0);
    py[i + 1] = x_seq[i](1);
  }
  std::vector<double> out(row_count());
  const std::size_t nobs = obstacles_.size();
  for (std::size_t j = 0; j < nobs; ++j) {
    const auto& obs = obstacles_[j];
    kernels::circle_barrier(px, py, obs.center.x(), obs.center.y(), obs.margin * obs.margin, h);
    const double gamma = gamma_for(j);
    for (std::size_t i = 0; i + 1 < n; ++i) out[i * nobs + j] = (h[i + 1] - h[i]) + gamma * h[i];
  }
  return out;
}

BarrierConstraintSet build_constraints(const std::vector<Obstacle>& obstacles, const ParamVector& theta,
                                       int horizon) {
  if (!(theta.gamma_vase > 0.0) || !(theta.gamma_toy > 0.0)) {
    throw ContractViolation("parameter components must be positive");
  }
  for (const auto& obs : obstacles) {
    if (obs.kind != ObstacleKind::Vase && obs.kind != ObstacleKind::Toy) {
      throw ContractViolation("unknown obstacle kind");
    }
  }
  return BarrierConstraintSet(obstacles,
                              {{ObstacleKind::Vase, theta.gamma_vase}, {ObstacleKind::Toy, theta.gamma_toy}},
                              horizon);
}

}  // namespace chatmpc::cbf
