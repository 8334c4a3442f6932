#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hopt/error.hpp"
#include "hopt/rcdm.hpp"
#include "oracles.hpp"

using namespace hopt;

namespace {

DualRidgeProblem small_problem(double mu = 1e-2) {
  return DualRidgeProblem::from_dataset(oracle::random_problem(60, 5, 12), mu);
}

}  // namespace

TEST_CASE("permutation sampling visits every coordinate once per epoch") {
  CoordinateSampler s(17, Sampling::Permutation, 3);
  for (int epoch = 0; epoch < 4; ++epoch) {
    std::set<std::size_t> seen;
    for (int k = 0; k < 17; ++k) seen.insert(s.next());
    CHECK(seen.size() == 17);
  }
  CoordinateSampler a(17, Sampling::IidUniform, 9), b(17, Sampling::IidUniform, 9);
  for (int k = 0; k < 100; ++k) {
    const std::size_t r = a.next();
    CHECK(r < 17);
    CHECK(r == b.next());
  }
}

TEST_CASE("step sizes follow their rules") {
  const DualRidgeProblem p = small_problem();
  const oracle::Mat g = oracle::dual_hessian(p.x(), p.mu());
  const StepSizes diag = step_sizes(p, StepRule::Diagonal);
  const StepSizes theo = step_sizes(p, StepRule::Theoretical);
  for (std::size_t r = 0; r < p.n(); ++r) {
    double row = 0.0;
    for (std::size_t j = 0; j < p.n(); ++j) row += std::abs(g[r][j]);
    CHECK(diag.gamma[r] == doctest::Approx(1.0 / g[r][r]));
    CHECK(theo.gamma[r] == doctest::Approx(1.0 / (g[r][r] + row)));
  }
  CHECK(theo.gamma_min == *std::min_element(theo.gamma.begin(), theo.gamma.end()));
  CHECK(theo.gamma_max == *std::max_element(theo.gamma.begin(), theo.gamma.end()));
  CHECK_FALSE(theo.estimated);
  CHECK(step_sizes(p, StepRule::Theoretical, 10).estimated);
}

TEST_CASE("rcdm converges and is reproducible per seed") {
  const DualRidgeProblem p = small_problem();
  RcdmConfig cfg;
  cfg.epochs = 200;
  cfg.seed = 4;
  const RcdmResult a = rcdm_run(p, cfg), b = rcdm_run(p, cfg);
  CHECK(a.alpha == b.alpha);
  CHECK(a.trace.steps.size() == 201);
  CHECK(a.trace.steps.back().subopt < 1e-10 * a.trace.steps.front().subopt);
  CHECK(a.max_drift < 1e-10);
  CHECK(a.steps == 200 * p.n());
}

TEST_CASE("early stop honours the relative target") {
  const DualRidgeProblem p = small_problem();
  RcdmConfig cfg;
  cfg.epochs = 1000;
  cfg.stop_rel_subopt = 1e-6;
  const RcdmResult r = rcdm_run(p, cfg);
  CHECK(r.trace.steps.back().subopt <= 1e-6 * r.trace.steps.front().subopt);
  CHECK(r.trace.steps.size() < 1001);
}

TEST_CASE("explicit init at the optimum stays there") {
  const DualRidgeProblem p = small_problem();
  RcdmConfig cfg;
  cfg.epochs = 3;
  cfg.init = RcdmInit::explicit_point(p.minimizer());
  const RcdmResult r = rcdm_run(p, cfg);
  CHECK(r.trace.steps.front().subopt < 1e-25);
  CHECK(r.trace.steps.back().subopt < 1e-25);
}

TEST_CASE("rho split reassembles the Hessian") {
  const DualRidgeProblem p = small_problem();
  const double nd = static_cast<double>(p.n());
  for (double rho : {1.0 / nd, 2.0 / nd, p.hessian_norm()}) {
    const RhoSplit s = rho_split(p, rho);
    const DenseMatrix l = s.l_matrix(), sm = s.s_matrix(), g = p.dense_hessian();
    for (std::size_t i = 0; i < p.n(); ++i)
      for (std::size_t j = 0; j < p.n(); ++j) CHECK(l(i, j) + sm(i, j) == doctest::Approx(g(i, j)).scale(1.0).epsilon(1e-12));
    Vector x(p.n());
    for (std::size_t i = 0; i < p.n(); ++i) x[i] = std::cos(static_cast<double>(i));
    CHECK(s.l_quad(x) + s.s_quad(x) == doctest::Approx(dot(x, p.hessian_times(x))).epsilon(1e-10));
  }
  try {
    rho_split(p, 0.5 / nd);
    FAIL("expected RhoOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RhoOutOfRange);
  }
}

TEST_CASE("theorem checkpoints are zero, powers of two and epoch ends") {
  const auto c = theorem_checkpoints(10, 2);
  CHECK(c == std::vector<std::size_t>{0, 1, 2, 4, 8, 10, 20});
}

TEST_CASE("theorem and distance checks hold with theoretical steps") {
  const DualRidgeProblem p = small_problem(1e-3);
  RcdmConfig cfg;
  cfg.step_rule = StepRule::Theoretical;
  cfg.sampling = Sampling::IidUniform;
  cfg.epochs = 10;
  const ThinSVD& s = p.svd();
  const double rho = (s.singulars.back() * s.singulars.back() / p.mu() + 1.0) / static_cast<double>(p.n());
  CHECK(rcdm_theorem_check(p, cfg, rho, 20).all_hold());
  CHECK(distance_tracking_check(p, cfg, 20).all_hold());
}

TEST_CASE("fast-convergence expectation is exact over coordinates") {
  const DualRidgeProblem p = small_problem(1e-3);
  const StepSizes steps = step_sizes(p, StepRule::Theoretical);
  const RhoSplit split = rho_split(p, 1.0 / static_cast<double>(p.n()));
  // ρ = 1/n puts everything into L, so S = 0 and the decrement must hold.
  const FastConvergenceReport f = fast_convergence_check(p, steps, split, Vector(p.n(), 0.0));
  CHECK(f.gradient_condition);
  CHECK(f.decrement_holds);
  CHECK(f.lhs <= f.rhs);
}
