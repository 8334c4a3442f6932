#pragma once

// Generalized linear models R(w) = E[φ(xᵀw) − y·xᵀw] on Gaussian designs,
// with the biased step w⁺ = w − γR'(w) − ηE[yx].

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hopt/linalg.hpp"
#include "hopt/spectral.hpp"
#include "hopt/trace.hpp"

namespace hopt {

enum class LinkKind { Logistic, Squared };

struct LinkFunction {
  LinkKind kind = LinkKind::Logistic;

  static LinkFunction logistic() { return {LinkKind::Logistic}; }
  static LinkFunction squared() { return {LinkKind::Squared}; }

  std::string name() const;
  double value(double a) const;  // overflow-safe for the logistic link
  double d1(double a) const;
  double d2(double a) const;
  /// φ̄ with |φ''| <= φ̄ everywhere.
  double d2_bound() const;
};

LinkFunction parse_link(const std::string& name);

class GlmProblem {
 public:
  /// `sigma` is the design covariance the Stein-based quantities refer to.
  GlmProblem(DenseMatrix x, Vector y, LinkFunction link, DenseMatrix sigma);
  /// Uses the sample's own second-moment matrix XᵀX/n as Σ.
  static GlmProblem with_empirical_covariance(DenseMatrix x, Vector y, LinkFunction link);

  const DenseMatrix& x() const noexcept { return x_; }
  const Vector& y() const noexcept { return y_; }
  const LinkFunction& link() const noexcept { return link_; }
  const DenseMatrix& sigma() const noexcept { return sigma_; }
  /// L = ‖Σ‖
  double lipschitz() const noexcept { return lipschitz_; }
  /// E[yx] over the sample.
  const Vector& response_moment() const noexcept { return eyx_; }
  std::size_t n() const noexcept { return x_.rows(); }
  std::size_t d() const noexcept { return x_.cols(); }

 private:
  DenseMatrix x_;
  Vector y_;
  LinkFunction link_;
  DenseMatrix sigma_;
  double lipschitz_ = 0.0;
  Vector eyx_;
};

/// XᵀX / n
DenseMatrix empirical_covariance(const DenseMatrix& x);

struct GaussianGlmSpec {
  std::size_t n = 0;
  DenseMatrix sigma;
  Vector w_true;
  LinkKind link = LinkKind::Logistic;
  double noise = 0.1;  // squared link: y = 2xᵀw_true + noise·N(0,1)
  std::uint64_t seed = 0;
};

/// x ~ N(0, Σ). Logistic responses are Bernoulli(sigmoid(xᵀw_true)) in {0, 1}.
/// Rows are generated in fixed-size chunks with per-chunk seeds, so the
/// sample does not depend on the number of worker threads.
GlmProblem generate_gaussian_glm(const GaussianGlmSpec& spec);

double glm_risk(const GlmProblem& p, std::span<const double> w);
Vector glm_gradient(const GlmProblem& p, std::span<const double> w);
/// ‖E[xφ'(xᵀw)] − E[φ''(xᵀw)]·Σw‖ over the sample.
double stein_residual(const GlmProblem& p, std::span<const double> w);

struct GlmMinimizerOptions {
  double grad_tol = 1e-10;
  std::size_t max_iter = 1000000;
};

/// Plain GD with step 1/(φ̄·‖XᵀX/n‖) until ‖R'(w)‖ <= grad_tol.
Vector glm_minimizer(const GlmProblem& p, const GlmMinimizerOptions& opts = {});

/// c_{w*} = 1 / E[φ''(xᵀw*)]
double glm_curvature_constant(const GlmProblem& p, std::span<const double> w_star);

struct StepPair {
  double gamma = 0.0;
  double eta = 0.0;
};

struct ScheduleGrid {
  Vector gammas;
  Vector etas;
  /// 20 log-spaced γ in [1e-3/L, 10/L]; 21 η evenly spaced in [−1/L, 1/L].
  static ScheduleGrid defaults(double lipschitz);
};

enum class SearchMode {
  ContractionTarget,  // ‖w⁺ − w* − (I − Σ/L)(w − w*)‖_Σ
  Distance,     // ‖w⁺ − w*‖_Σ
  Risk,         // R(w⁺)
};

struct SearchOptions {
  SearchMode mode = SearchMode::ContractionTarget;
  bool refine = true;  // exact 2x2 least squares after the grid (quadratic modes only)
};

/// Grid minimizer; ties go to the smaller γ, then the smaller |η|.
StepPair schedule_search(const GlmProblem& p, std::span<const double> w, const ScheduleGrid& grid,
                         const std::optional<Vector>& w_star, const SearchOptions& opts = {});

struct BiasedStepSchedule {
  std::vector<StepPair> fixed;  // used when line_search is off; last entry repeats
  bool line_search = false;
  ScheduleGrid grid;
  SearchOptions search;
};

struct BiasedRun {
  OptimizerTrace trace;
  std::vector<StepPair> used;
  std::vector<Vector> iterates;  // w_0 .. w_steps
};

/// Trace subopt is R(w) − R(w*) when w_star is given, NaN otherwise.
BiasedRun biased_gd_run(const GlmProblem& p, std::span<const double> w0,
                        const BiasedStepSchedule& schedule, std::size_t steps,
                        const std::optional<Vector>& w_star);

struct GlmBound {
  double literal = 0.0;           // c·τ·φ̄·((1 − ζ/L)^{2t}(1 − r) + rζ)
  double primal_analogous = 0.0;  // ½·c·φ̄·τζ·(r(1 − ζ/L)^{2t} + (d − r))
  std::size_t r = 0;
};

/// Requires 0 < ζ < L, else ZetaOutOfRange.
GlmBound glm_bound(const TauProfile& profile, const GlmProblem& p, double c_wstar, double zeta,
                   std::size_t t);

}  // namespace hopt
