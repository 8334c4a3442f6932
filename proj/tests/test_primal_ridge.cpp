#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hopt/error.hpp"
#include "hopt/primal_ridge.hpp"
#include "hopt/spectral.hpp"
#include "oracles.hpp"

using namespace hopt;

TEST_CASE("minimizer and optimum match a naive solve") {
  const Dataset d = oracle::random_problem(80, 5, 1);
  const RidgeProblem p = RidgeProblem::from_dataset(d, 1e-2);
  const oracle::Ridge ref(d.x, d.y, 1e-2);
  CHECK(oracle::max_abs_diff(p.minimizer(), ref.beta_star) < 1e-12);
  CHECK(p.optimum() == doctest::Approx(ref.objective(ref.beta_star)).epsilon(1e-12));
  CHECK(oracle::max_abs_diff(primal_minimizer(d.x, d.y, 1e-2), ref.beta_star) < 1e-12);
}

TEST_CASE("zero-init suboptimality has the diagonal closed form") {
  const Dataset d = oracle::random_problem(100, 6, 2);
  const double mu = 1e-3;
  const RidgeProblem p = RidgeProblem::from_dataset(d, mu);
  const SpectralDecomposition s = decompose(d, mu);
  double expected = 0.0;
  for (std::size_t j = 0; j < 6; ++j) expected += 0.5 * s.response_cov[j] * s.response_cov[j] / s.regularized_variances[j];
  CHECK(suboptimality(p, Vector(6, 0.0)) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(suboptimality_direct(p, Vector(6, 0.0)) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("gd_run trace starts at the initial point and decreases with a safe step") {
  const Dataset d = oracle::random_problem(60, 4, 3);
  const RidgeProblem p = RidgeProblem::from_dataset(d, 1e-2);
  const OptimizerTrace t = gd_run(p, Vector(4, 0.0), 1.0 / p.lambda_max(), 50);
  CHECK(t.steps.front().t == 0);
  CHECK(t.steps.back().t == 50);
  CHECK_FALSE(t.meta.step_flagged);
  for (std::size_t i = 1; i < t.steps.size(); ++i) CHECK(t.steps[i].subopt <= t.steps[i - 1].subopt);
  CHECK(oracle::max_abs_diff(t.final_iterate, gd_closed_form(p, Vector(4, 0.0), 1.0 / p.lambda_max(), 50)) < 1e-12);
}

TEST_CASE("an over-long step is run but flagged") {
  const Dataset d = oracle::random_problem(60, 4, 4);
  const RidgeProblem p = RidgeProblem::from_dataset(d, 1e-1);
  const OptimizerTrace t = gd_run(p, Vector(4, 0.0), 2.0 / p.lambda_max(), 3);
  CHECK(t.meta.step_flagged);
}

TEST_CASE("diverging runs raise Diverged") {
  const Dataset d = oracle::random_problem(60, 4, 5);
  const RidgeProblem p = RidgeProblem::from_dataset(d, 1e-1);
  try {
    gd_run(p, Vector(4, 0.0), 10.0 / p.lambda_max(), 500);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Diverged);
  }
}

TEST_CASE("bound dominates zero-init GD above the admissible zeta") {
  SyntheticSpec spec;
  spec.n = 400;
  spec.d = 10;
  spec.spectrum = geometric_spectrum(10, 1.0, 1e-3);
  spec.correlations = bounded_correlations(spec.spectrum, 0.4, 1.0);
  spec.noise_seed = 8;
  const Dataset d = generate_synthetic(spec);
  const double mu = 1e-4;
  const RidgeProblem p = RidgeProblem::from_dataset(d, mu);
  const SpectralDecomposition s = decompose(d, mu);
  const TauProfile prof = measure_tau(s);
  const double gamma = 1.0 / p.lambda_max();
  const double zmin = primal_bound_min_zeta(prof, 10);
  const OptimizerTrace t = gd_run(p, Vector(10, 0.0), gamma, 300);
  for (const auto& rec : t.steps) {
    for (double z = zmin; z <= 1.0; z *= 1.5) {
      const PrimalBound b = primal_bound(prof, s, gamma, z, rec.t, 10);
      CHECK(b.value >= rec.subopt);
      CHECK(b.r == count_above(s, z));
    }
  }
  // t = 0 at ζ = zmin is tight: ½dτζ = ½Σρ².
  CHECK(primal_bound(prof, s, gamma, zmin, 0, 10).value == doctest::Approx(0.5 * prof.rho2_sum()));
}

TEST_CASE("kappa envelope decays geometrically") {
  CHECK(kappa_envelope(2.0, 4.0, 0) == 2.0);
  CHECK(kappa_envelope(2.0, 4.0, 1) == doctest::Approx(0.5));
}

TEST_CASE("trace CSV carries the requested columns") {
  const Dataset d = oracle::random_problem(30, 3, 6);
  const RidgeProblem p = RidgeProblem::from_dataset(d, 1e-2);
  const OptimizerTrace t = gd_run(p, Vector(3, 0.0), 1.0 / p.lambda_max(), 2);
  std::ostringstream out;
  write_trace_csv(out, t, TraceColumns::Log10);
  CHECK(out.str().rfind("t,subopt,grad_norm,dist,epochs,log10_subopt\n", 0) == 0);
}
