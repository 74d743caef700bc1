#include "chatmpc/kernels/kernels.hpp"

namespace chatmpc::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void circle_barrier(const double* px, const double* py, double cx, double cy, double r2, double* out,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = px[i] - cx;
    const double dy = py[i] - cy;
    out[i] = (dx * dx + dy * dy) - r2;
  }
}

}  // namespace chatmpc::kernels::scalar
