#include <cstdlib>
#include <string>

#include "chatmpc/error.hpp"
#include "chatmpc/kernels/kernels.hpp"

namespace chatmpc::kernels {
namespace {

struct Table {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_squares)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  void (*circle_barrier)(const double*, const double*, double, double, double, double*, std::size_t);
};

constexpr Table kScalar{Isa::Scalar, scalar::dot, scalar::sum_squares, scalar::axpy, scalar::scale,
                        scalar::circle_barrier};

Table select() {
  if (const char* forced = std::getenv("CHATMPC_ISA"); forced && std::string(forced) == "scalar") {
    return kScalar;
  }
#if defined(CHATMPC_HAVE_AVX2)
  if (isa_available(Isa::Avx2)) {
    return {Isa::Avx2, avx2::dot, avx2::sum_squares, avx2::axpy, avx2::scale, avx2::circle_barrier};
  }
#endif
#if defined(CHATMPC_HAVE_NEON)
  return {Isa::Neon, neon::dot, neon::sum_squares, neon::axpy, neon::scale, neon::circle_barrier};
#endif
  return kScalar;
}

const Table& table() {
  static const Table t = select();
  return t;
}

void require_same(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ContractViolation("kernel operands differ in length: " + std::to_string(a) + " vs " +
                            std::to_string(b));
  }
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(CHATMPC_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(CHATMPC_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return table().isa; }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same(a.size(), b.size());
  return table().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) { return table().sum_squares(a.data(), a.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same(x.size(), y.size());
  table().axpy(alpha, x.data(), y.data(), x.size());
}

void scale(double alpha, std::span<double> x) { table().scale(alpha, x.data(), x.size()); }

void circle_barrier(std::span<const double> px, std::span<const double> py, double cx, double cy,
                    double r2, std::span<double> out) {
  require_same(px.size(), py.size());
  require_same(px.size(), out.size());
  table().circle_barrier(px.data(), py.data(), cx, cy, r2, out.data(), px.size());
}

}  // namespace chatmpc::kernels
