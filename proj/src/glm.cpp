#include "hopt/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hopt/error.hpp"
#include "hopt/kernels.hpp"
#include "hopt/parallel.hpp"

namespace hopt {

std::string LinkFunction::name() const { return kind == LinkKind::Logistic ? "logistic" : "squared"; }

double LinkFunction::value(double a) const {
  if (kind == LinkKind::Squared) return a * a;
  return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

double LinkFunction::d1(double a) const {
  if (kind == LinkKind::Squared) return 2.0 * a;
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

double LinkFunction::d2(double a) const {
  if (kind == LinkKind::Squared) return 2.0;
  const double s = d1(a);
  return s * (1.0 - s);
}

double LinkFunction::d2_bound() const { return kind == LinkKind::Squared ? 2.0 : 0.25; }

LinkFunction parse_link(const std::string& name) {
  if (name == "logistic") return LinkFunction::logistic();
  if (name == "squared") return LinkFunction::squared();
  throw Error(ErrorKind::ConfigError, "unknown link '" + name + "'");
}

DenseMatrix empirical_covariance(const DenseMatrix& x) {
  if (x.rows() == 0) throw Error(ErrorKind::InvalidArgument, "empty sample");
  return gram(x, 1.0 / static_cast<double>(x.rows()));
}

GlmProblem::GlmProblem(DenseMatrix x, Vector y, LinkFunction link, DenseMatrix sigma)
    : x_(std::move(x)), y_(std::move(y)), link_(link), sigma_(std::move(sigma)) {
  require_same_size(x_.rows(), y_.size(), "glm rows");
  require_same_size(sigma_.rows(), x_.cols(), "glm covariance size");
  if (x_.rows() == 0) throw Error(ErrorKind::InvalidArgument, "glm sample is empty");
  lipschitz_ = sym_eig(sigma_).eigenvalues.front();
  eyx_ = matvec_t(x_, y_);
  simd::scale(1.0 / static_cast<double>(x_.rows()), eyx_);
}

GlmProblem GlmProblem::with_empirical_covariance(DenseMatrix x, Vector y, LinkFunction link) {
  DenseMatrix s = empirical_covariance(x);
  return GlmProblem(std::move(x), std::move(y), link, std::move(s));
}

GlmProblem generate_gaussian_glm(const GaussianGlmSpec& spec) {
  const std::size_t d = spec.sigma.rows();
  require_same_size(spec.sigma.cols(), d, "covariance shape");
  require_same_size(spec.w_true.size(), d, "w_true length");
  if (spec.n == 0) throw Error(ErrorKind::InvalidArgument, "n must be positive");

  const SymEig eig = sym_eig(spec.sigma);
  if (eig.eigenvalues.back() <= 0.0) {
    throw Error(ErrorKind::NotPositiveDefinite, "covariance must be positive definite");
  }
  DenseMatrix root(d, d);  // V diag(√λ) so that x = root·g has covariance Σ
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) root(i, j) = eig.eigenvectors(i, j) * std::sqrt(eig.eigenvalues[j]);

  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (spec.n + kChunk - 1) / kChunk;
  DenseMatrix x(spec.n, d);
  Vector y(spec.n);
  const LinkFunction link{spec.link};
  parallel_for(chunks, [&](std::size_t c) {
    std::mt19937_64 rng(derive_seed(spec.seed, c));
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    Vector g(d);
    for (std::size_t i = c * kChunk; i < std::min(spec.n, (c + 1) * kChunk); ++i) {
      for (double& v : g) v = normal(rng);
      auto row = x.row(i);
      for (std::size_t k = 0; k < d; ++k) row[k] = simd::dot(root.row(k), g);
      const double a = simd::dot(row, spec.w_true);
      if (spec.link == LinkKind::Logistic) {
        y[i] = unif(rng) < link.d1(a) ? 1.0 : 0.0;
      } else {
        y[i] = 2.0 * a + spec.noise * normal(rng);
      }
    }
  });
  return GlmProblem(std::move(x), std::move(y), link, spec.sigma);
}

double glm_risk(const GlmProblem& p, std::span<const double> w) {
  require_same_size(w.size(), p.d(), "glm weight length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.n(); ++i) {
    const double a = simd::dot(p.x().row(i), w);
    s += p.link().value(a) - p.y()[i] * a;
  }
  return s / static_cast<double>(p.n());
}

Vector glm_gradient(const GlmProblem& p, std::span<const double> w) {
  require_same_size(w.size(), p.d(), "glm weight length");
  Vector g(p.d(), 0.0);
  for (std::size_t i = 0; i < p.n(); ++i) {
    const auto row = p.x().row(i);
    simd::axpy(p.link().d1(simd::dot(row, w)) - p.y()[i], row, g);
  }
  simd::scale(1.0 / static_cast<double>(p.n()), g);
  return g;
}

double stein_residual(const GlmProblem& p, std::span<const double> w) {
  require_same_size(w.size(), p.d(), "glm weight length");
  Vector lhs(p.d(), 0.0);
  double curvature = 0.0;
  for (std::size_t i = 0; i < p.n(); ++i) {
    const auto row = p.x().row(i);
    const double a = simd::dot(row, w);
    simd::axpy(p.link().d1(a), row, lhs);
    curvature += p.link().d2(a);
  }
  const double inv_n = 1.0 / static_cast<double>(p.n());
  simd::scale(inv_n, lhs);
  const Vector sw = matvec(p.sigma(), w);
  simd::axpy(-curvature * inv_n, sw, lhs);
  return norm2(lhs);
}

Vector glm_minimizer(const GlmProblem& p, const GlmMinimizerOptions& opts) {
  const double l_hat = sym_eig(empirical_covariance(p.x())).eigenvalues.front();
  const double gamma = 1.0 / (p.link().d2_bound() * l_hat);
  Vector w(p.d(), 0.0);
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    const Vector g = glm_gradient(p, w);
    if (norm2(g) <= opts.grad_tol) return w;
    simd::axpy(-gamma, g, w);
  }
  throw Error(ErrorKind::Diverged, "GLM minimizer did not reach the gradient tolerance");
}

double glm_curvature_constant(const GlmProblem& p, std::span<const double> w_star) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.n(); ++i) s += p.link().d2(simd::dot(p.x().row(i), w_star));
  return static_cast<double>(p.n()) / s;
}

ScheduleGrid ScheduleGrid::defaults(double lipschitz) {
  ScheduleGrid g;
  const double lo = std::log(1e-3 / lipschitz);
  const double hi = std::log(10.0 / lipschitz);
  for (int i = 0; i < 20; ++i) g.gammas.push_back(std::exp(lo + (hi - lo) * i / 19.0));
  for (int i = -10; i <= 10; ++i) g.etas.push_back(static_cast<double>(i) / (10.0 * lipschitz));
  return g;
}

namespace {

double sigma_norm2(const DenseMatrix& sigma, std::span<const double> v) {
  return dot(v, matvec(sigma, v));
}

// w⁺ − target = base − γg − ηe, with base = w − target.
struct QuadraticSearch {
  Vector base;
  Vector g;
  const Vector* e;
  const DenseMatrix* sigma;

  double value(double gamma, double eta) const {
    Vector r = base;
    simd::axpy(-gamma, g, r);
    simd::axpy(-eta, *e, r);
    return sigma_norm2(*sigma, r);
  }

  std::optional<StepPair> least_squares() const {
    const Vector sg = matvec(*sigma, g);
    const Vector se = matvec(*sigma, *e);
    const double a11 = dot(g, sg), a12 = dot(g, se), a22 = dot(*e, se);
    const double b1 = dot(base, sg), b2 = dot(base, se);
    const double det = a11 * a22 - a12 * a12;
    if (!(std::abs(det) > 1e-14 * std::max(1e-300, a11 * a22))) {
      if (a11 <= 0.0) return std::nullopt;
      return StepPair{b1 / a11, 0.0};
    }
    return StepPair{(b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det};
  }
};

}  // namespace

StepPair schedule_search(const GlmProblem& p, std::span<const double> w, const ScheduleGrid& grid,
                         const std::optional<Vector>& w_star, const SearchOptions& opts) {
  if (grid.gammas.empty() || grid.etas.empty()) {
    throw Error(ErrorKind::InvalidArgument, "schedule grid is empty");
  }
  Vector gammas = grid.gammas;
  std::sort(gammas.begin(), gammas.end());
  Vector etas = grid.etas;
  std::stable_sort(etas.begin(), etas.end(),
                   [](double a, double b) { return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a < b); });

  const Vector g = glm_gradient(p, w);
  const Vector& e = p.response_moment();
  std::optional<QuadraticSearch> quad;
  if (opts.mode != SearchMode::Risk) {
    if (!w_star) throw Error(ErrorKind::InvalidArgument, "verification search needs w*");
    Vector target = *w_star;
    if (opts.mode == SearchMode::ContractionTarget) {
      Vector diff = subtract(w, *w_star);
      const Vector sd = matvec(p.sigma(), diff);
      simd::axpy(-1.0 / p.lipschitz(), sd, diff);
      simd::axpy(1.0, diff, target);
    }
    quad = QuadraticSearch{subtract(w, target), g, &e, &p.sigma()};
  }

  auto objective = [&](double gamma, double eta) {
    if (quad) return quad->value(gamma, eta);
    Vector next(w.begin(), w.end());
    simd::axpy(-gamma, g, next);
    simd::axpy(-eta, e, next);
    return glm_risk(p, next);
  };

  StepPair best{gammas.front(), etas.front()};
  double best_value = std::numeric_limits<double>::infinity();
  for (double gamma : gammas) {
    for (double eta : etas) {
      const double v = objective(gamma, eta);
      if (v < best_value) {
        best_value = v;
        best = {gamma, eta};
      }
    }
  }
  if (quad && opts.refine) {
    if (auto ls = quad->least_squares(); ls && ls->gamma > 0.0 && std::isfinite(ls->eta)) {
      if (quad->value(ls->gamma, ls->eta) <= best_value) best = *ls;
    }
  }
  return best;
}

BiasedRun biased_gd_run(const GlmProblem& p, std::span<const double> w0,
                        const BiasedStepSchedule& schedule, std::size_t steps,
                        const std::optional<Vector>& w_star) {
  require_same_size(w0.size(), p.d(), "glm initial point");
  if (!schedule.line_search && schedule.fixed.empty()) {
    throw Error(ErrorKind::InvalidArgument, "schedule has no steps");
  }
  const double risk_star = w_star ? glm_risk(p, *w_star) : 0.0;
  BiasedRun run;
  Vector w(w0.begin(), w0.end());
  double initial = 0.0;
  for (std::size_t t = 0;; ++t) {
    const Vector g = glm_gradient(p, w);
    run.iterates.push_back(w);
    if (should_log(t) || t == steps) {
      TraceRecord r;
      r.t = t;
      r.epochs = static_cast<double>(t);
      r.grad_norm = norm2(g);
      if (w_star) {
        r.subopt = glm_risk(p, w) - risk_star;
        r.dist = norm2(subtract(w, *w_star));
        if (t == 0) initial = std::abs(r.subopt);
        check_divergence(std::abs(r.subopt), initial);
      } else {
        r.subopt = std::numeric_limits<double>::quiet_NaN();
        r.dist = std::numeric_limits<double>::quiet_NaN();
      }
      run.trace.steps.push_back(r);
    }
    if (t == steps) break;
    StepPair step = schedule.line_search
                        ? schedule_search(p, w, schedule.grid, w_star, schedule.search)
                        : schedule.fixed[std::min(t, schedule.fixed.size() - 1)];
    if (!(step.gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma_t must be positive");
    run.used.push_back(step);
    simd::axpy(-step.gamma, g, w);
    simd::axpy(-step.eta, p.response_moment(), w);
    if (!all_finite(w)) throw Error(ErrorKind::Diverged, "GLM iterate became non-finite");
  }
  run.trace.final_iterate = w;
  return run;
}

GlmBound glm_bound(const TauProfile& profile, const GlmProblem& p, double c_wstar, double zeta,
                   std::size_t t) {
  const double l = p.lipschitz();
  if (!(zeta > 0.0 && zeta < l)) throw Error(ErrorKind::ZetaOutOfRange, "need 0 < zeta < L");
  GlmBound b;
  b.r = count_above(profile, zeta);
  const double r = static_cast<double>(b.r);
  const double d = static_cast<double>(profile.per_feature.size());
  const double decay = std::pow(1.0 - zeta / l, 2.0 * static_cast<double>(t));
  const double phi = p.link().d2_bound();
  b.literal = c_wstar * profile.tau * phi * (decay * (1.0 - r) + r * zeta);
  b.primal_analogous = 0.5 * c_wstar * phi * profile.tau * zeta * (r * decay + (d - r));
  return b;
}

}  // namespace hopt
