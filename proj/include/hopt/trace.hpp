#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "hopt/linalg.hpp"

namespace hopt {

struct TraceRecord {
  std::size_t t = 0;
  double subopt = 0.0;
  double grad_norm = 0.0;
  double dist = 0.0;
  double epochs = 0.0;
  double kernel_part = std::numeric_limits<double>::quiet_NaN();
  double image_part = std::numeric_limits<double>::quiet_NaN();
  std::size_t epoch = 0;
};

struct TraceMeta {
  std::string init_label;
  Vector step_sizes;  // one entry for GD, summary (min, max) for RCDM
  std::uint64_t seed = 0;
  bool step_flagged = false;  // step size outside the guaranteed-convergence range
};

enum class TraceColumns : unsigned {
  Base = 0,
  Split = 1u << 0,  // kernel_part, image_part
  Epoch = 1u << 1,
  Log10 = 1u << 2,  // log10_subopt
};

constexpr TraceColumns operator|(TraceColumns a, TraceColumns b) {
  return static_cast<TraceColumns>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool has(TraceColumns set, TraceColumns flag) {
  return (static_cast<unsigned>(set) & static_cast<unsigned>(flag)) != 0;
}

struct OptimizerTrace {
  std::vector<TraceRecord> steps;
  TraceMeta meta;
  Vector final_iterate;
};

/// Steps 0..1000 are logged individually, later steps every 10th.
constexpr bool should_log(std::size_t t) noexcept { return t <= 1000 || t % 10 == 0; }

/// Throws Diverged when `subopt` is non-finite or exceeds 1e12 times `initial`.
void check_divergence(double subopt, double initial);

/// Shortest round-trip decimal form.
std::string format_number(double v);

void write_trace_csv(std::ostream& out, const OptimizerTrace& trace,
                     TraceColumns columns = TraceColumns::Base);

}  // namespace hopt
