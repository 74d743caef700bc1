#pragma once

// Data-parallel inner loops used by the embedding pipeline and the barrier
// evaluation. Each kernel has a scalar reference implementation and, where
// the target supports it, a SIMD variant. The top-level functions dispatch
// once at first use to the widest variant the CPU reports.
//
// Setting CHATMPC_ISA=scalar in the environment forces the reference path.

#include <span>
#include <string_view>

namespace chatmpc::kernels {

enum class Isa { Scalar, Avx2, Neon };

Isa active_isa();
std::string_view isa_name(Isa isa);

/// True when `isa` was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
/// out[k] = (px[k] - cx)^2 + (py[k] - cy)^2 - r2
///
/// Bitwise identical across variants (no fused multiply-add, no reordering).
void circle_barrier(std::span<const double> px, std::span<const double> py, double cx, double cy,
                    double r2, std::span<double> out);

// Per-variant entry points. The dispatching functions above validate sizes;
// these assume equal lengths.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum_squares(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void circle_barrier(const double* px, const double* py, double cx, double cy, double r2, double* out,
                    std::size_t n);
}  // namespace scalar

#if defined(CHATMPC_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum_squares(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void circle_barrier(const double* px, const double* py, double cx, double cy, double r2, double* out,
                    std::size_t n);
}  // namespace avx2
#endif

#if defined(CHATMPC_HAVE_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double sum_squares(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void circle_barrier(const double* px, const double* py, double cx, double cy, double r2, double* out,
                    std::size_t n);
}  // namespace neon
#endif

}  // namespace chatmpc::kernels
