#pragma once

namespace chatmpc {

/// Adjustable controller parameters: one barrier decay rate per obstacle kind.
struct ParamVector {
  double gamma_vase = 0.4;
  double gamma_toy = 0.4;

  static constexpr double kMin = 1e-4;
  static constexpr double kMax = 1e4;

  bool operator==(const ParamVector&) const = default;
};

}  // namespace chatmpc
