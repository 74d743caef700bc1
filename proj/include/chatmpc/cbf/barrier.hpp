#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chatmpc/mpc/plant.hpp"
#include "chatmpc/params.hpp"

namespace chatmpc::cbf {

enum class ObstacleKind { Vase, Toy };

std::string_view kind_name(ObstacleKind kind);
/// "vase" / "toy"; throws ParseError otherwise.
ObstacleKind parse_kind(std::string_view name);

struct Obstacle {
  ObstacleKind kind;
  Eigen::Vector2d center;
  double margin;  // safety radius R > 0

  Obstacle(ObstacleKind kind, Eigen::Vector2d center, double margin);
};

/// h(p) = |p - c|^2 - R^2; nonnegative outside the safety margin.
double h_value(const Obstacle& obs, const Eigen::Vector2d& pos);

/// dh + gamma h for the transition x_i -> x_next; the barrier condition holds iff >= 0.
double barrier_residual(const Obstacle& obs, double gamma, const mpc::State& x_i,
                        const mpc::State& x_next);

/// One barrier inequality: obstacle `obstacle` between predicted steps `step` and `step + 1`.
struct BarrierRow {
  std::size_t step;
  std::size_t obstacle;
  double gamma;
};

/// The allowable state-sequence set: one discrete barrier inequality per
/// (step i in [0, Np-1], obstacle j).
class BarrierConstraintSet {
 public:
  BarrierConstraintSet(std::vector<Obstacle> obstacles, std::map<ObstacleKind, double> gamma_by_kind,
                       int horizon);

  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  const std::map<ObstacleKind, double>& gamma_by_kind() const { return gamma_by_kind_; }
  int horizon() const { return horizon_; }
  double gamma_for(std::size_t obstacle) const;

  std::size_t row_count() const { return obstacles_.size() * static_cast<std::size_t>(horizon_); }
  /// Step-major: all obstacles for step 0, then step 1, ...
  std::vector<BarrierRow> rows() const;

  /// Residual of every row along `x0` followed by the predicted sequence.
  std::vector<double> residuals(const mpc::State& x0, const mpc::StateSeq& x_seq) const;

 private:
  std::vector<Obstacle> obstacles_;
  std::map<ObstacleKind, double> gamma_by_kind_;
  int horizon_;
};

BarrierConstraintSet build_constraints(const std::vector<Obstacle>& obstacles, const ParamVector& theta,
                                       int horizon);

}  // namespace chatmpc::cbf
