#include <doctest.h>

#include <cmath>

#include "hopt/error.hpp"
#include "hopt/glm.hpp"
#include "hopt/spectral.hpp"

using namespace hopt;

namespace {

GaussianGlmSpec spec2(LinkKind link, std::size_t n, std::uint64_t seed) {
  GaussianGlmSpec s;
  s.n = n;
  s.sigma = DenseMatrix::diagonal(Vector{1.0, 0.3});
  s.w_true = {1.0, -0.5};
  s.link = link;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("link functions have consistent derivatives") {
  for (const LinkFunction& f : {LinkFunction::logistic(), LinkFunction::squared()}) {
    for (double a : {-30.0, -2.0, 0.0, 0.7, 5.0, 40.0}) {
      const double h = 1e-5;
      CHECK(f.d1(a) == doctest::Approx((f.value(a + h) - f.value(a - h)) / (2 * h)).epsilon(1e-6));
      CHECK(f.d2(a) <= f.d2_bound());
    }
  }
  CHECK(std::isfinite(LinkFunction::logistic().value(800.0)));
  CHECK(parse_link("squared").kind == LinkKind::Squared);
  CHECK_THROWS_AS(parse_link("probit"), Error);
}

TEST_CASE("generator is chunked and seed-deterministic") {
  const GlmProblem a = generate_gaussian_glm(spec2(LinkKind::Logistic, 3000, 5));
  const GlmProblem b = generate_gaussian_glm(spec2(LinkKind::Logistic, 3000, 5));
  CHECK(a.x() == b.x());
  CHECK(a.y() == b.y());
  for (double y : a.y()) CHECK((y == 0.0 || y == 1.0));
  const DenseMatrix c = empirical_covariance(a.x());
  CHECK(c(0, 0) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(c(1, 1) == doctest::Approx(0.3).epsilon(0.1));
}

TEST_CASE("minimizer zeroes the gradient; logistic recovers the truth roughly") {
  const GlmProblem p = generate_gaussian_glm(spec2(LinkKind::Logistic, 20000, 6));
  const Vector w = glm_minimizer(p);
  CHECK(norm2(glm_gradient(p, w)) <= 1e-10);
  CHECK(w[0] == doctest::Approx(1.0).epsilon(0.15));
  CHECK(w[1] == doctest::Approx(-0.5).epsilon(0.25));
  CHECK(glm_curvature_constant(p, w) >= 4.0);  // φ'' <= 1/4
}

TEST_CASE("squared link with the default step contracts as I − Σ/L") {
  const GlmProblem raw = generate_gaussian_glm(spec2(LinkKind::Squared, 5000, 7));
  const GlmProblem p = GlmProblem::with_empirical_covariance(raw.x(), raw.y(), LinkFunction::squared());
  const Vector w_star = glm_minimizer(p);
  BiasedStepSchedule sched;
  sched.fixed = {{1.0 / (2.0 * p.lipschitz()), 0.0}};
  const BiasedRun run = biased_gd_run(p, Vector{0.0, 0.0}, sched, 10, w_star);
  const SymEig e = sym_eig(p.sigma());
  for (std::size_t t = 1; t < run.iterates.size(); ++t) {
    const Vector prev = matvec_t(e.eigenvectors, subtract(run.iterates[t - 1], w_star));
    const Vector cur = matvec_t(e.eigenvectors, subtract(run.iterates[t], w_star));
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(cur[i] == doctest::Approx((1.0 - e.eigenvalues[i] / p.lipschitz()) * prev[i]).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("schedule search never loses to the plain step on its own objective") {
  const GlmProblem p = generate_gaussian_glm(spec2(LinkKind::Logistic, 4000, 8));
  const Vector w_star = glm_minimizer(p);
  BiasedStepSchedule searched;
  searched.line_search = true;
  searched.grid = ScheduleGrid::defaults(p.lipschitz());
  searched.search.mode = SearchMode::Risk;
  const BiasedRun r = biased_gd_run(p, Vector{0.0, 0.0}, searched, 5, w_star);
  for (std::size_t t = 1; t < r.trace.steps.size(); ++t) CHECK(r.trace.steps[t].subopt <= r.trace.steps[t - 1].subopt + 1e-15);
  const ScheduleGrid g = ScheduleGrid::defaults(2.0);
  CHECK(g.etas.size() == 21);
  CHECK(g.etas.front() == doctest::Approx(-0.5));
  CHECK(g.etas.back() == doctest::Approx(0.5));
}

TEST_CASE("glm_bound validates zeta and both readings are nonnegative") {
  const GlmProblem raw = generate_gaussian_glm(spec2(LinkKind::Squared, 2000, 9));
  const GlmProblem p = GlmProblem::with_empirical_covariance(raw.x(), raw.y(), LinkFunction::squared());
  const TauProfile prof = measure_tau(decompose(p.x(), p.y(), 0.0));
  const GlmBound b = glm_bound(prof, p, 0.5, 0.5 * p.lipschitz(), 3);
  CHECK(b.literal >= 0.0);
  CHECK(b.primal_analogous >= 0.0);
  for (double z : {0.0, p.lipschitz(), 2.0 * p.lipschitz()}) {
    try {
      glm_bound(prof, p, 0.5, z, 1);
      FAIL("expected ZetaOutOfRange");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ZetaOutOfRange);
    }
  }
}

TEST_CASE("stein residual shrinks with the sample size") {
  double small = 0, large = 0;
  for (std::uint64_t r = 0; r < 8; ++r) {
    small += stein_residual(generate_gaussian_glm(spec2(LinkKind::Logistic, 500, 100 + r)), Vector{1.0, -0.5});
    large += stein_residual(generate_gaussian_glm(spec2(LinkKind::Logistic, 32000, 200 + r)), Vector{1.0, -0.5});
  }
  CHECK(large < small);
}
