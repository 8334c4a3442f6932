#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace hopt::simd {
namespace {

const KernelTable* lookup(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return &detail::scalar_table();
    case Backend::Avx2: return detail::avx2_table();
    case Backend::Neon: return detail::neon_table();
  }
  return nullptr;
}

const KernelTable* choose_default() noexcept {
  if (const char* env = std::getenv("HOPT_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &detail::scalar_table();
    if (want == "avx2" && detail::avx2_table()) return detail::avx2_table();
    if (want == "neon" && detail::neon_table()) return detail::neon_table();
  }
  if (auto* t = detail::avx2_table()) return t;
  if (auto* t = detail::neon_table()) return t;
  return &detail::scalar_table();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{choose_default()};
  return slot;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) noexcept { return lookup(b) != nullptr; }

const KernelTable& kernels_for(Backend b) {
  const KernelTable* t = lookup(b);
  if (!t) throw std::invalid_argument("SIMD backend not available: " + std::string(backend_name(b)));
  return *t;
}

const KernelTable& active_kernels() noexcept {
  return *active_slot().load(std::memory_order_acquire);
}

Backend active_backend() noexcept { return active_kernels().backend; }

void set_backend(Backend b) { active_slot().store(&kernels_for(b), std::memory_order_release); }

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (backend_available(b)) out.push_back(b);
  }
  return out;
}

}  // namespace hopt::simd
