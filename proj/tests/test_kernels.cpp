#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "hopt/kernels.hpp"

using namespace hopt::simd;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar backend is always available and listed first") {
  const auto b = available_backends();
  REQUIRE_FALSE(b.empty());
  CHECK(b.front() == Backend::Scalar);
  CHECK(backend_available(Backend::Scalar));
  CHECK(backend_name(Backend::Scalar) == "scalar");
}

TEST_CASE("every available backend agrees with the scalar reference") {
  const KernelTable& ref = kernels_for(Backend::Scalar);
  // Lengths straddle the vector width and the unrolled block size.
  for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 127, 1000}) {
    const auto a = random_vec(n, 10 + n), b = random_vec(n, 20 + n);
    for (Backend be : available_backends()) {
      CAPTURE(backend_name(be));
      CAPTURE(n);
      const KernelTable& k = kernels_for(be);
      const double scale = 1.0 + static_cast<double>(n);
      CHECK(std::abs(k.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-13 * scale);
      CHECK(std::abs(k.squared_norm(a.data(), n) - ref.squared_norm(a.data(), n)) <= 1e-13 * scale);

      auto y1 = b, y2 = b;
      k.axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

      auto s1 = a, s2 = a;
      k.scale(-2.5, s1.data(), n);
      ref.scale(-2.5, s2.data(), n);
      CHECK(s1 == s2);
    }
  }
}

TEST_CASE("axpy leaves entries past n untouched") {
  for (Backend be : available_backends()) {
    std::vector<double> x(9, 1.0), y(9, 0.0);
    kernels_for(be).axpy(2.0, x.data(), y.data(), 5);
    for (std::size_t i = 0; i < 9; ++i) CHECK(y[i] == (i < 5 ? 2.0 : 0.0));
  }
}

TEST_CASE("set_backend switches the active table and rejects missing ones") {
  const Backend before = active_backend();
  set_backend(Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  for (Backend be : {Backend::Avx2, Backend::Neon}) {
    if (!backend_available(be)) CHECK_THROWS_AS(kernels_for(be), std::invalid_argument);
  }
  set_backend(before);
  CHECK(active_backend() == before);
}
