#include "hopt/trace.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "hopt/error.hpp"

namespace hopt {

void check_divergence(double subopt, double initial) {
  if (!std::isfinite(subopt)) throw Error(ErrorKind::Diverged, "suboptimality became non-finite");
  if (initial > 0.0 && subopt > 1e12 * initial) {
    throw Error(ErrorKind::Diverged,
                "suboptimality " + format_number(subopt) + " exceeds 1e12 x initial " +
                    format_number(initial));
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_trace_csv(std::ostream& out, const OptimizerTrace& trace, TraceColumns columns) {
  out << "t,subopt,grad_norm,dist,epochs";
  if (has(columns, TraceColumns::Split)) out << ",kernel_part,image_part";
  if (has(columns, TraceColumns::Epoch)) out << ",epoch";
  if (has(columns, TraceColumns::Log10)) out << ",log10_subopt";
  out << '\n';
  for (const auto& r : trace.steps) {
    out << r.t << ',' << format_number(r.subopt) << ',' << format_number(r.grad_norm) << ','
        << format_number(r.dist) << ',' << format_number(r.epochs);
    if (has(columns, TraceColumns::Split)) {
      out << ',' << format_number(r.kernel_part) << ',' << format_number(r.image_part);
    }
    if (has(columns, TraceColumns::Epoch)) out << ',' << r.epoch;
    if (has(columns, TraceColumns::Log10)) {
      out << ',' << format_number(r.subopt > 0.0 ? std::log10(r.subopt) : -INFINITY);
    }
    out << '\n';
  }
}

}  // namespace hopt
