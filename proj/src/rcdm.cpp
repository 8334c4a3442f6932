#include "hopt/rcdm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "hopt/error.hpp"
#include "hopt/kernels.hpp"
#include "hopt/parallel.hpp"

namespace hopt {

StepSizes step_sizes(const DualRidgeProblem& p, StepRule rule, std::size_t exact_limit) {
  const std::size_t n = p.n();
  const double nd = static_cast<double>(n);
  const double scale = 1.0 / (p.mu() * nd * nd);
  StepSizes s;
  s.gamma.resize(n);
  if (rule == StepRule::Diagonal) {
    for (std::size_t r = 0; r < n; ++r) s.gamma[r] = 1.0 / p.hessian_diag()[r];
  } else if (n <= exact_limit) {
    const DenseMatrix& x = p.x();
    for (std::size_t r = 0; r < n; ++r) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += std::abs(simd::dot(x.row(r), x.row(j)));
      s.gamma[r] = 1.0 / (p.hessian_diag()[r] + row * scale + 1.0 / nd);
    }
  } else {
    s.estimated = true;
    Vector norms(n);
    for (std::size_t r = 0; r < n; ++r) norms[r] = std::sqrt(p.row_sq_norms()[r]);
    const double total = std::accumulate(norms.begin(), norms.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      s.gamma[r] = 1.0 / (p.hessian_diag()[r] + norms[r] * total * scale + 1.0 / nd);
    }
  }
  const auto [lo, hi] = std::minmax_element(s.gamma.begin(), s.gamma.end());
  s.gamma_min = *lo;
  s.gamma_max = *hi;
  return s;
}

CoordinateSampler::CoordinateSampler(std::size_t n, Sampling sampling, std::uint64_t seed)
    : n_(n), sampling_(sampling), rng_(seed), order_(n), pos_(n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sampler needs n >= 1");
  std::iota(order_.begin(), order_.end(), 0);
}

std::size_t CoordinateSampler::next() {
  if (sampling_ == Sampling::IidUniform) return static_cast<std::size_t>(rng_() % n_);
  if (pos_ == n_) {
    for (std::size_t i = n_; i > 1; --i) std::swap(order_[i - 1], order_[rng_() % i]);
    pos_ = 0;
  }
  return order_[pos_++];
}

Vector resolve_init(const DualRidgeProblem& p, const RcdmInit& init) {
  switch (init.kind) {
    case RcdmInit::Kind::Zero:
      return Vector(p.n(), 0.0);
    case RcdmInit::Kind::Homotopic:
      return homotopic_init(p, init.nu).alpha0;
    case RcdmInit::Kind::Explicit:
      require_same_size(init.alpha.size(), p.n(), "explicit RCDM init");
      return init.alpha;
  }
  return {};
}

namespace {

TraceRecord epoch_record(const DualRidgeProblem& p, std::span<const double> alpha, std::size_t t,
                         std::size_t epoch, bool split) {
  TraceRecord r;
  r.t = t;
  r.epoch = epoch;
  r.epochs = static_cast<double>(epoch);
  r.subopt = p.suboptimality(alpha);
  r.grad_norm = norm2(p.gradient(alpha));
  r.dist = norm2(subtract(alpha, p.minimizer()));
  if (split) {
    const DualSplit s = dual_suboptimality_split(p, alpha);
    r.kernel_part = s.kernel_part;
    r.image_part = s.image_part;
  }
  return r;
}

const char* init_label(const RcdmInit& init) {
  switch (init.kind) {
    case RcdmInit::Kind::Zero: return "zero";
    case RcdmInit::Kind::Homotopic: return "homotopic";
    case RcdmInit::Kind::Explicit: return "explicit";
  }
  return "";
}

}  // namespace

RcdmResult rcdm_run(const DualRidgeProblem& p, const RcdmConfig& cfg, const StepObserver& observer) {
  if (cfg.epochs == 0) throw Error(ErrorKind::InvalidArgument, "epochs must be >= 1");
  if (cfg.init.kind == RcdmInit::Kind::Homotopic && !(cfg.init.nu > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "homotopic init needs nu > 0");
  }
  const std::size_t n = p.n();
  const double nd = static_cast<double>(n);
  const double inv_mun2 = 1.0 / (p.mu() * nd * nd);
  const StepSizes steps = step_sizes(p, cfg.step_rule);
  const DenseMatrix& x = p.x();
  const Vector& y = p.y();

  RcdmResult out;
  out.trace.meta.init_label = init_label(cfg.init);
  out.trace.meta.seed = cfg.seed;
  out.trace.meta.step_sizes = {steps.gamma_min, steps.gamma_max};

  Vector alpha = resolve_init(p, cfg.init);
  Vector v = p.xt_times(alpha);
  CoordinateSampler sampler(n, cfg.sampling, cfg.seed);

  out.trace.steps.push_back(epoch_record(p, alpha, 0, 0, cfg.track_split));
  const double initial = out.trace.steps.front().subopt;
  if (observer) observer(0, alpha);

  std::size_t t = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t r = sampler.next();
      const auto xr = x.row(r);
      const double grad = simd::dot(xr, v) * inv_mun2 + (alpha[r] - y[r]) / nd;
      const double delta = -steps.gamma[r] * grad;
      alpha[r] += delta;
      simd::axpy(delta, xr, v);
      ++t;
      if (observer) observer(t, alpha);
    }
    Vector fresh = p.xt_times(alpha);
    out.max_drift = std::max(out.max_drift, norm2(subtract(v, fresh)));
    v = std::move(fresh);

    TraceRecord rec = epoch_record(p, alpha, t, epoch, cfg.track_split);
    check_divergence(rec.subopt, initial);
    out.trace.steps.push_back(rec);
    if (cfg.stop_rel_subopt > 0.0 && rec.subopt <= cfg.stop_rel_subopt * initial) break;
  }
  out.steps = t;
  out.trace.final_iterate = alpha;
  out.alpha = std::move(alpha);
  return out;
}

// --- spectral split ----------------------------------------------------------

namespace {

// Σ_{i∈image, keep(i)} g_i c_i u_i + kernel_weight·(x − U c)
Vector split_times(const RhoSplit& s, std::span<const double> x, bool want_l) {
  const Vector c = matvec_t(s.basis, x);
  Vector weighted(c.size(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (s.image_in_l[i] == want_l) weighted[i] = s.image_eigenvalues[i] * c[i];
  }
  Vector out = matvec(s.basis, weighted);
  if (s.kernel_in_l == want_l) {
    Vector k(x.begin(), x.end());
    simd::axpy(-1.0, matvec(s.basis, c), k);
    simd::axpy(1.0 / static_cast<double>(s.n), k, out);
  }
  return out;
}

DenseMatrix split_matrix(const RhoSplit& s, bool want_l) {
  DenseMatrix m(s.n, s.n);
  Vector e(s.n, 0.0);
  for (std::size_t j = 0; j < s.n; ++j) {
    e[j] = 1.0;
    m.set_column(j, split_times(s, e, want_l));
    e[j] = 0.0;
  }
  return m;
}

}  // namespace

double RhoSplit::l_quad(std::span<const double> x) const { return dot(x, split_times(*this, x, true)); }
double RhoSplit::s_quad(std::span<const double> x) const { return dot(x, split_times(*this, x, false)); }
Vector RhoSplit::s_times(std::span<const double> x) const { return split_times(*this, x, false); }
DenseMatrix RhoSplit::l_matrix() const { return split_matrix(*this, true); }
DenseMatrix RhoSplit::s_matrix() const { return split_matrix(*this, false); }

double RhoSplit::s_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < image_eigenvalues.size(); ++i)
    if (!image_in_l[i]) m = std::max(m, image_eigenvalues[i]);
  if (!kernel_in_l && basis.cols() < n) m = std::max(m, 1.0 / static_cast<double>(n));
  return m;
}

double RhoSplit::l_min_support() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < image_eigenvalues.size(); ++i)
    if (image_in_l[i]) m = std::min(m, image_eigenvalues[i]);
  if (kernel_in_l && basis.cols() < n) m = std::min(m, 1.0 / static_cast<double>(n));
  return m;
}

RhoSplit rho_split(const DualRidgeProblem& p, double rho) {
  const double nd = static_cast<double>(p.n());
  const double top = p.hessian_norm();
  const double eps = 1e-12 * top;
  if (!(rho >= 1.0 / nd - eps && rho <= top + eps)) {
    throw Error(ErrorKind::RhoOutOfRange, "rho must lie in [1/n, ||G||]");
  }
  const ThinSVD& svd = p.svd();
  RhoSplit s;
  s.rho = rho;
  s.n = p.n();
  s.basis = svd.left;
  s.image_eigenvalues.resize(svd.rank());
  s.image_in_l.resize(svd.rank());
  for (std::size_t i = 0; i < svd.rank(); ++i) {
    const double s2 = svd.singulars[i] * svd.singulars[i];
    s.image_eigenvalues[i] = (s2 / p.mu() + 1.0) / nd;
    s.image_in_l[i] = s.image_eigenvalues[i] >= rho;
  }
  s.kernel_in_l = 1.0 / nd >= rho;
  return s;
}

// --- Monte-Carlo checks ------------------------------------------------------

bool TheoremReport::all_hold() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.holds; });
}

bool DistanceReport::all_hold() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.holds; });
}

std::vector<std::size_t> theorem_checkpoints(std::size_t n, std::size_t epochs) {
  std::vector<std::size_t> pts{0};
  for (std::size_t t = 1; t < n; t *= 2) pts.push_back(t);
  for (std::size_t e = 1; e <= epochs; ++e) pts.push_back(e * n);
  return pts;
}

namespace {

struct TrialSamples {
  Vector subopt;
  Vector grad2;
  Vector dist2;
};

std::vector<TrialSamples> run_trials(const DualRidgeProblem& p, const RcdmConfig& cfg,
                                     const std::vector<std::size_t>& checkpoints,
                                     std::size_t trials) {
  std::vector<TrialSamples> out(trials);
  RcdmConfig base = cfg;
  base.stop_rel_subopt = 0.0;
  base.track_split = false;
  if (base.init.kind == RcdmInit::Kind::Homotopic) {
    base.init = RcdmInit::explicit_point(resolve_init(p, cfg.init));
  }
  parallel_for(trials, [&](std::size_t k) {
    RcdmConfig c = base;
    c.seed = derive_seed(cfg.seed, k);
    TrialSamples& s = out[k];
    std::size_t next = 0;
    rcdm_run(p, c, [&](std::size_t t, std::span<const double> alpha) {
      if (next >= checkpoints.size() || checkpoints[next] != t) return;
      ++next;
      s.subopt.push_back(p.suboptimality(alpha));
      s.grad2.push_back(simd::squared_norm(p.gradient(alpha)));
      s.dist2.push_back(simd::squared_norm(subtract(alpha, p.minimizer())));
    });
  });
  return out;
}

}  // namespace

TheoremReport rcdm_theorem_check(const DualRidgeProblem& p, const RcdmConfig& cfg, double rho,
                                 std::size_t trials, double slack) {
  if (trials == 0) throw Error(ErrorKind::InvalidArgument, "need at least one trial");
  rho_split(p, rho);  // range check
  const StepSizes steps = step_sizes(p, cfg.step_rule);
  const Vector alpha0 = resolve_init(p, cfg.init);
  const double q0 = p.suboptimality(alpha0);
  const double d0 = simd::squared_norm(subtract(alpha0, p.minimizer()));
  const double ratio = steps.gamma_max / steps.gamma_min;
  const double nd = static_cast<double>(p.n());

  const auto checkpoints = theorem_checkpoints(p.n(), cfg.epochs);
  const auto samples = run_trials(p, cfg, checkpoints, trials);

  TheoremReport rep;
  rep.rho = rho;
  rep.gamma_min = steps.gamma_min;
  rep.gamma_max = steps.gamma_max;
  rep.slack = slack;
  rep.trials = trials;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    TheoremRow row;
    row.t = checkpoints[c];
    for (const auto& s : samples) {
      row.lhs_subopt += s.subopt[c];
      row.lhs_grad += s.grad2[c];
    }
    row.lhs_subopt /= static_cast<double>(trials);
    row.lhs_grad /= static_cast<double>(trials);
    const double rate = 1.0 - rho * steps.gamma_min / nd;
    row.rhs_subopt = 0.5 * std::pow(rate, static_cast<double>(row.t)) * q0 + 0.5 * rho * ratio * d0;
    row.rhs_grad = 2.0 * rho * rho * ratio * d0;
    row.subopt_holds = row.lhs_subopt <= slack * row.rhs_subopt;
    row.grad_holds = row.lhs_grad <= slack * row.rhs_grad;
    row.holds = row.subopt_holds || row.grad_holds;
    rep.rows.push_back(row);
  }
  return rep;
}

DistanceReport distance_tracking_check(const DualRidgeProblem& p, const RcdmConfig& cfg,
                                       std::size_t trials, double slack) {
  if (trials == 0) throw Error(ErrorKind::InvalidArgument, "need at least one trial");
  const StepSizes steps = step_sizes(p, cfg.step_rule);
  const Vector alpha0 = resolve_init(p, cfg.init);
  const double d0 = simd::squared_norm(subtract(alpha0, p.minimizer()));
  const auto checkpoints = theorem_checkpoints(p.n(), cfg.epochs);
  const auto samples = run_trials(p, cfg, checkpoints, trials);

  DistanceReport rep;
  rep.ratio = steps.gamma_max / steps.gamma_min;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    DistanceRow row;
    row.t = checkpoints[c];
    for (const auto& s : samples) row.mean_dist2 += s.dist2[c];
    row.mean_dist2 /= static_cast<double>(trials);
    row.bound = rep.ratio * d0;
    row.holds = row.mean_dist2 <= slack * row.bound;
    rep.rows.push_back(row);
  }
  return rep;
}

FastConvergenceReport fast_convergence_check(const DualRidgeProblem& p, const StepSizes& steps,
                                             const RhoSplit& split, std::span<const double> alpha) {
  const std::size_t n = p.n();
  require_same_size(alpha.size(), n, "fast convergence point");
  const Vector delta = subtract(alpha, p.minimizer());
  const Vector g = p.hessian_times(delta);
  const Vector l_delta = split_times(split, delta, true);
  const double base = dot(delta, l_delta);

  // diag(L) from the spectral pieces
  Vector l_diag(n, split.kernel_in_l ? 1.0 / static_cast<double>(n) : 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double proj = 0.0;
    double in_l = 0.0;
    for (std::size_t i = 0; i < split.image_eigenvalues.size(); ++i) {
      const double u = split.basis(r, i);
      proj += u * u;
      if (split.image_in_l[i]) in_l += split.image_eigenvalues[i] * u * u;
    }
    l_diag[r] = in_l + (split.kernel_in_l ? (1.0 - proj) / static_cast<double>(n) : 0.0);
  }

  FastConvergenceReport rep;
  for (std::size_t r = 0; r < n; ++r) {
    const double step = steps.gamma[r] * g[r];
    rep.lhs += base - 2.0 * step * l_delta[r] + step * step * l_diag[r];
  }
  rep.lhs /= static_cast<double>(n);
  rep.rhs = (1.0 - steps.gamma_min * split.rho / static_cast<double>(n)) * base;
  const Vector s_delta = split.s_times(delta);
  rep.gradient_condition = simd::squared_norm(g) >= 2.0 * simd::squared_norm(s_delta);
  rep.decrement_holds = rep.lhs <= rep.rhs * (1.0 + 1e-12) + 1e-300;
  return rep;
}

void write_theorem_csv(std::ostream& out, const TheoremReport& report) {
  out << "t,lhs_subopt,rhs_subopt,lhs_grad,rhs_grad,disjunction_holds\n";
  for (const auto& r : report.rows) {
    out << r.t << ',' << format_number(r.lhs_subopt) << ',' << format_number(r.rhs_subopt) << ','
        << format_number(r.lhs_grad) << ',' << format_number(r.rhs_grad) << ',' << (r.holds ? 1 : 0)
        << '\n';
  }
}

}  // namespace hopt
