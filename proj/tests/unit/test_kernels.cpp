#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "chatmpc/error.hpp"
#include "chatmpc/kernels/kernels.hpp"

using namespace chatmpc;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("dispatch reports an available ISA") {
  CHECK(kernels::isa_available(kernels::active_isa()));
  CHECK(kernels::isa_available(kernels::Isa::Scalar));
  MESSAGE("active kernels: " << kernels::isa_name(kernels::active_isa()));
  const char* forced = std::getenv("CHATMPC_ISA");
  if (forced && std::string(forced) == "scalar") CHECK(kernels::active_isa() == kernels::Isa::Scalar);
}

TEST_CASE("dispatched kernels agree with scalar reference") {
  std::mt19937_64 rng(7);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    const double ref = kernels::scalar::dot(a.data(), b.data(), n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
    CHECK(std::abs(kernels::dot(a, b) - ref) <= 1e-13 * (1.0 + mag));
    CHECK(std::abs(kernels::sum_squares(a) - kernels::scalar::sum_squares(a.data(), n)) <=
          1e-13 * (1.0 + kernels::scalar::sum_squares(a.data(), n)));

    // element-wise kernels must match bit for bit
    auto y1 = b;
    auto y2 = b;
    kernels::axpy(0.37, a, y1);
    kernels::scalar::axpy(0.37, a.data(), y2.data(), n);
    CHECK(y1 == y2);

    kernels::scale(-1.7, y1);
    kernels::scalar::scale(-1.7, y2.data(), n);
    CHECK(y1 == y2);

    std::vector<double> h1(n), h2(n);
    kernels::circle_barrier(a, b, -1.0, -3.0, 0.25, h1);
    kernels::scalar::circle_barrier(a.data(), b.data(), -1.0, -3.0, 0.25, h2.data(), n);
    CHECK(h1 == h2);
  }
}

#if defined(CHATMPC_HAVE_AVX2)
TEST_CASE("avx2 variants match scalar when the CPU supports them") {
  if (!kernels::isa_available(kernels::Isa::Avx2)) return;
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 9u, 15u, 16u, 17u, 512u, 513u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    const double ref = kernels::scalar::dot(a.data(), b.data(), n);
    CHECK(kernels::avx2::dot(a.data(), b.data(), n) == doctest::Approx(ref).epsilon(1e-12));
    std::vector<double> h1(n), h2(n);
    kernels::avx2::circle_barrier(a.data(), b.data(), 1.5, -3.0, 0.25, h1.data(), n);
    kernels::scalar::circle_barrier(a.data(), b.data(), 1.5, -3.0, 0.25, h2.data(), n);
    CHECK(h1 == h2);
    auto y1 = b;
    auto y2 = b;
    kernels::avx2::axpy(2.5, a.data(), y1.data(), n);
    kernels::scalar::axpy(2.5, a.data(), y2.data(), n);
    CHECK(y1 == y2);
  }
}
#endif

TEST_CASE("kernel operand length mismatch is a contract violation") {
  std::vector<double> a(3), b(4), out(3);
  CHECK_THROWS_AS(kernels::dot(a, b), ContractViolation);
  CHECK_THROWS_AS(kernels::axpy(1.0, a, b), ContractViolation);
  CHECK_THROWS_AS(kernels::circle_barrier(a, b, 0, 0, 1, out), ContractViolation);
}

TEST_CASE("circle barrier values") {
  const std::vector<double> px{0.0, -1.0, -0.5}, py{0.0, -2.5, -3.0};
  std::vector<double> h(3);
  kernels::circle_barrier(px, py, -1.0, -3.0, 0.25, h);
  CHECK(h[0] == doctest::Approx(9.75));
  CHECK(h[1] == doctest::Approx(0.0));
  CHECK(h[2] == doctest::Approx(0.0));
}
