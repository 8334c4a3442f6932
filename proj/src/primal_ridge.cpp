#include "hopt/primal_ridge.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "hopt/error.hpp"
#include "hopt/kernels.hpp"

namespace hopt {

struct RidgeProblem::Lazy {
  std::once_flag once;
  SymEig eig;
};

RidgeProblem::RidgeProblem(const DenseMatrix& x, std::span<const double> y, double mu)
    : RidgeProblem(add_identity(gram(x, 1.0 / static_cast<double>(x.rows())), mu),
                   [&] {
                     require_same_size(x.rows(), y.size(), "ridge rows");
                     Vector b = matvec_t(x, y);
                     simd::scale(1.0 / static_cast<double>(x.rows()), b);
                     return b;
                   }(),
                   mu, Direct{}) {}

RidgeProblem::RidgeProblem(DenseMatrix hessian, Vector linear, double mu, Direct)
    : hessian_(std::move(hessian)), linear_(std::move(linear)), mu_(mu),
      lazy_(std::make_shared<Lazy>()) {
  if (!(mu >= 0.0)) throw Error(ErrorKind::InvalidArgument, "mu must be non-negative");
  require_same_size(hessian_.rows(), hessian_.cols(), "ridge hessian shape");
  require_same_size(hessian_.rows(), linear_.size(), "ridge hessian vs linear term");
  if (!hessian_.all_finite() || !all_finite(linear_)) {
    throw Error(ErrorKind::NonFinite, "ridge problem has non-finite entries");
  }
  minimizer_ = solve_spd(hessian_, linear_);
  optimum_ = -0.5 * dot(linear_, minimizer_);
}

const SymEig& RidgeProblem::eigen() const {
  std::call_once(lazy_->once, [this] { lazy_->eig = sym_eig(hessian_); });
  return lazy_->eig;
}

Vector RidgeProblem::gradient(std::span<const double> beta) const {
  require_same_size(beta.size(), dim(), "gradient dimension");
  Vector g = matvec(hessian_, beta);
  simd::axpy(-1.0, linear_, g);
  return g;
}

double primal_objective(const RidgeProblem& p, std::span<const double> beta) {
  require_same_size(beta.size(), p.dim(), "objective dimension");
  const Vector hb = matvec(p.hessian(), beta);
  return 0.5 * dot(beta, hb) - dot(beta, p.linear());
}

Vector primal_minimizer(const RidgeProblem& p) { return solve_spd(p.hessian(), p.linear()); }

Vector primal_minimizer(const DenseMatrix& x, std::span<const double> y, double mu) {
  require_same_size(x.rows(), y.size(), "minimizer rows");
  const DenseMatrix a = add_identity(gram(x), static_cast<double>(x.rows()) * mu);
  return solve_spd(a, matvec_t(x, y));
}

double suboptimality(const RidgeProblem& p, std::span<const double> beta) {
  require_same_size(beta.size(), p.dim(), "suboptimality dimension");
  const SymEig& eig = p.eigen();
  const Vector diff = subtract(beta, p.minimizer());
  const Vector coords = matvec_t(eig.eigenvectors, diff);
  double s = 0.0;
  for (std::size_t j = 0; j < coords.size(); ++j) s += eig.eigenvalues[j] * coords[j] * coords[j];
  return 0.5 * s;
}

double suboptimality_direct(const RidgeProblem& p, std::span<const double> beta) {
  return primal_objective(p, beta) - p.optimum();
}

OptimizerTrace gd_run(const RidgeProblem& p, std::span<const double> beta0, double gamma,
                      std::size_t steps, const GdOptions& opts) {
  require_same_size(beta0.size(), p.dim(), "gd initial point");
  if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "step size must be positive");

  OptimizerTrace trace;
  trace.meta.init_label = opts.init_label;
  trace.meta.step_sizes = {gamma};
  trace.meta.step_flagged = gamma >= 2.0 / p.lambda_max();

  Vector beta(beta0.begin(), beta0.end());
  double initial = 0.0;
  for (std::size_t t = 0;; ++t) {
    Vector g = p.gradient(beta);
    if (opts.observer) opts.observer(t, beta);
    if (should_log(t) || t == steps) {
      TraceRecord r;
      r.t = t;
      r.subopt = suboptimality(p, beta);
      r.grad_norm = norm2(g);
      r.dist = norm2(subtract(beta, p.minimizer()));
      r.epochs = static_cast<double>(t);
      if (t == 0) initial = r.subopt;
      check_divergence(r.subopt, initial);
      trace.steps.push_back(r);
    }
    if (t == steps) break;
    simd::axpy(-gamma, g, beta);
  }
  trace.final_iterate = std::move(beta);
  return trace;
}

Vector gd_closed_form(const RidgeProblem& p, std::span<const double> beta0, double gamma,
                      std::size_t t) {
  require_same_size(beta0.size(), p.dim(), "closed form initial point");
  if (t == 0) return Vector(beta0.begin(), beta0.end());
  const SymEig& eig = p.eigen();
  Vector coords = matvec_t(eig.eigenvectors, subtract(beta0, p.minimizer()));
  for (std::size_t j = 0; j < coords.size(); ++j) {
    coords[j] *= std::pow(1.0 - gamma * eig.eigenvalues[j], static_cast<double>(t));
  }
  Vector beta = matvec(eig.eigenvectors, coords);
  simd::axpy(1.0, p.minimizer(), beta);
  return beta;
}

PrimalBound primal_bound(const TauProfile& profile, const SpectralDecomposition& spec, double gamma,
                         double zeta, std::size_t t, std::size_t d) {
  if (!(zeta >= 0.0)) throw Error(ErrorKind::ZetaOutOfRange, "zeta must be non-negative");
  PrimalBound b;
  b.r = count_above(spec, zeta);
  b.flagged = gamma * zeta >= 1.0;
  const double decay = std::pow(1.0 - gamma * zeta, 2.0 * static_cast<double>(t));
  b.value = 0.5 * (static_cast<double>(b.r) * decay + static_cast<double>(d - std::min(d, b.r))) *
            profile.tau * zeta;
  return b;
}

double primal_bound_min_zeta(const TauProfile& profile, std::size_t d) {
  if (profile.tau <= 0.0 || d == 0) return 0.0;
  return profile.rho2_sum() / (static_cast<double>(d) * profile.tau);
}

double kappa_envelope(double initial_subopt, double kappa, std::size_t t) {
  return initial_subopt * std::pow(1.0 - 2.0 / kappa, 2.0 * static_cast<double>(t));
}

double mean_squared_loss(const DenseMatrix& x, std::span<const double> y,
                         std::span<const double> beta) {
  require_same_size(x.rows(), y.size(), "loss rows");
  if (x.rows() == 0) return 0.0;
  Vector r = matvec(x, beta);
  simd::axpy(-1.0, y, r);
  return simd::squared_norm(r) / static_cast<double>(x.rows());
}

}  // namespace hopt
