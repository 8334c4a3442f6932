#pragma once

// Vector kernels behind every hot loop (dot products, axpy updates).
// A scalar reference implementation is always present; AVX2+FMA and NEON
// variants are selected at runtime when the CPU supports them. The
// HOPT_SIMD environment variable ("scalar", "avx2", "neon") overrides the
// automatic choice.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hopt::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b) noexcept;

struct KernelTable {
  Backend backend;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*squared_norm)(const double* a, std::size_t n);
  // y = alpha * y
  void (*scale)(double alpha, double* y, std::size_t n);
};

bool backend_available(Backend b) noexcept;

/// Table for a specific backend. Throws std::invalid_argument when the
/// backend was not compiled in or the CPU lacks the instructions.
const KernelTable& kernels_for(Backend b);

/// Currently selected table.
const KernelTable& active_kernels() noexcept;
Backend active_backend() noexcept;

/// Process-wide override; meant for startup code and tests.
void set_backend(Backend b);

/// Backends usable on this machine, scalar first.
std::vector<Backend> available_backends();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active_kernels().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline double squared_norm(std::span<const double> a) {
  return active_kernels().squared_norm(a.data(), a.size());
}

inline void scale(double alpha, std::span<double> y) {
  active_kernels().scale(alpha, y.data(), y.size());
}

}  // namespace hopt::simd
