#pragma once

// Randomized coordinate descent on the dual ridge objective.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "hopt/dual_ridge.hpp"
#include "hopt/trace.hpp"

namespace hopt {

enum class StepRule { Theoretical, Diagonal };
enum class Sampling { Permutation, IidUniform };

struct RcdmInit {
  enum class Kind { Zero, Homotopic, Explicit };
  Kind kind = Kind::Zero;
  double nu = 0.0;
  Vector alpha;

  static RcdmInit zero() { return {}; }
  static RcdmInit homotopic(double nu) { return {Kind::Homotopic, nu, {}}; }
  static RcdmInit explicit_point(Vector alpha) { return {Kind::Explicit, 0.0, std::move(alpha)}; }
};

struct RcdmConfig {
  StepRule step_rule = StepRule::Diagonal;
  Sampling sampling = Sampling::Permutation;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  RcdmInit init;
  bool track_split = false;      // kernel/image columns in the trace
  double stop_rel_subopt = 0.0;  // stop once subopt <= this x initial (0: run all epochs)
};

struct StepSizes {
  Vector gamma;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  bool estimated = false;  // row sums bounded instead of computed
};

/// Theoretical: γ_r⁻¹ = G_rr + Σ_j |G_rj| (exact when n <= exact_limit).
/// Diagonal: γ_r = 1 / G_rr.
StepSizes step_sizes(const DualRidgeProblem& p, StepRule rule, std::size_t exact_limit = 2000);

/// Coordinate stream: a fresh permutation each epoch, or iid uniform draws.
/// Uses the raw engine output so sequences are identical across platforms.
class CoordinateSampler {
 public:
  CoordinateSampler(std::size_t n, Sampling sampling, std::uint64_t seed);
  std::size_t next();

 private:
  std::size_t n_;
  Sampling sampling_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

Vector resolve_init(const DualRidgeProblem& p, const RcdmInit& init);

using StepObserver = std::function<void(std::size_t t, std::span<const double> alpha)>;

struct RcdmResult {
  OptimizerTrace trace;  // one row per epoch, row 0 is the initial point
  Vector alpha;
  double max_drift = 0.0;  // largest ‖v − Xᵀα‖ seen at an epoch resync
  std::size_t steps = 0;
};

/// α_r ← α_r − γ_r Q'_r(α), Q'_r = x_rᵀv/(μn²) + α_r/n − y_r/n, v = Xᵀα kept
/// incrementally and resynchronized every epoch. The observer sees t = 0 and
/// every step after it.
RcdmResult rcdm_run(const DualRidgeProblem& p, const RcdmConfig& cfg,
                    const StepObserver& observer = {});

/// G = L_ρ + S_ρ by thresholding G's eigenvalues at ρ. Image eigenvalues are
/// (σ_i²/μ + 1)/n along u_i; the kernel block has eigenvalue 1/n.
struct RhoSplit {
  double rho = 0.0;
  std::size_t n = 0;
  DenseMatrix basis;  // U, n x r
  Vector image_eigenvalues;
  std::vector<bool> image_in_l;
  bool kernel_in_l = false;

  /// xᵀLx and xᵀSx without forming either matrix.
  double l_quad(std::span<const double> x) const;
  double s_quad(std::span<const double> x) const;
  Vector s_times(std::span<const double> x) const;
  double s_norm() const;
  /// Smallest eigenvalue of L on its support (infinity when L = 0).
  double l_min_support() const;
  DenseMatrix l_matrix() const;
  DenseMatrix s_matrix() const;
};

/// Requires 1/n <= ρ <= ‖G‖, else RhoOutOfRange.
RhoSplit rho_split(const DualRidgeProblem& p, double rho);

struct TheoremRow {
  std::size_t t = 0;
  double lhs_subopt = 0.0;
  double rhs_subopt = 0.0;
  double lhs_grad = 0.0;
  double rhs_grad = 0.0;
  bool subopt_holds = false;
  bool grad_holds = false;
  bool holds = false;
};

struct TheoremReport {
  double rho = 0.0;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  double slack = 1.1;
  std::size_t trials = 0;
  std::vector<TheoremRow> rows;
  bool all_hold() const noexcept;
};

/// Log points: 0, powers of two below n, then every epoch boundary.
std::vector<std::size_t> theorem_checkpoints(std::size_t n, std::size_t epochs);

/// Monte-Carlo estimates of E[Q(α_t)] − Q* and E‖Q'(α_t)‖² over `trials`
/// independent seeds, against the theorem's two envelopes times `slack`.
TheoremReport rcdm_theorem_check(const DualRidgeProblem& p, const RcdmConfig& cfg, double rho,
                                 std::size_t trials, double slack = 1.1);

struct DistanceRow {
  std::size_t t = 0;
  double mean_dist2 = 0.0;
  double bound = 0.0;
  bool holds = false;
};

struct DistanceReport {
  double ratio = 0.0;  // γ_max / γ_min
  std::vector<DistanceRow> rows;
  bool all_hold() const noexcept;
};

/// E‖α_t − α*‖² <= slack·(γ_max/γ_min)·‖α₀ − α*‖²
DistanceReport distance_tracking_check(const DualRidgeProblem& p, const RcdmConfig& cfg,
                                       std::size_t trials, double slack = 1.1);

struct FastConvergenceReport {
  double lhs = 0.0;  // E_r ‖α⁺ − α*‖²_L, exact over r
  double rhs = 0.0;  // (1 − γ_min ρ / n)‖α − α*‖²_L
  bool gradient_condition = false;  // ‖Q'(α)‖² >= 2‖S(α − α*)‖²
  bool decrement_holds = false;
};

/// One-step check of the L-part contraction for uniform coordinate choice.
FastConvergenceReport fast_convergence_check(const DualRidgeProblem& p, const StepSizes& steps,
                                             const RhoSplit& split, std::span<const double> alpha);

void write_theorem_csv(std::ostream& out, const TheoremReport& report);

}  // namespace hopt
