#pragma once

// Primal ridge: Q(β) = ½βᵀHβ − βᵀb with H = XᵀX/n + μI and b = Xᵀy/n.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>

#include "hopt/data_io.hpp"
#include "hopt/linalg.hpp"
#include "hopt/spectral.hpp"
#include "hopt/trace.hpp"

namespace hopt {

class RidgeProblem {
 public:
  RidgeProblem(const DenseMatrix& x, std::span<const double> y, double mu);
  /// Direct construction from (H, b); `mu` is recorded, not added to H.
  static RidgeProblem from_hessian(DenseMatrix hessian, Vector linear, double mu) {
    return RidgeProblem(std::move(hessian), std::move(linear), mu, Direct{});
  }

  static RidgeProblem from_dataset(const Dataset& data, double mu) {
    return RidgeProblem(data.x, data.y, mu);
  }

  struct Direct {};
  RidgeProblem(DenseMatrix hessian, Vector linear, double mu, Direct);

  const DenseMatrix& hessian() const noexcept { return hessian_; }
  const Vector& linear() const noexcept { return linear_; }
  double mu() const noexcept { return mu_; }
  std::size_t dim() const noexcept { return linear_.size(); }

  const Vector& minimizer() const noexcept { return minimizer_; }
  /// Q* = −½ bᵀβ*
  double optimum() const noexcept { return optimum_; }

  /// Eigendecomposition of H, computed on first use.
  const SymEig& eigen() const;
  double lambda_max() const { return eigen().eigenvalues.front(); }
  double lambda_min() const { return eigen().eigenvalues.back(); }
  double condition_number() const { return lambda_max() / lambda_min(); }

  Vector gradient(std::span<const double> beta) const;

 private:
  struct Lazy;

  DenseMatrix hessian_;
  Vector linear_;
  double mu_ = 0.0;
  Vector minimizer_;
  double optimum_ = 0.0;
  std::shared_ptr<Lazy> lazy_;
};

double primal_objective(const RidgeProblem& p, std::span<const double> beta);

/// H⁻¹b by Cholesky.
Vector primal_minimizer(const RidgeProblem& p);
/// (XᵀX + nμI)⁻¹Xᵀy, the unnormalized form.
Vector primal_minimizer(const DenseMatrix& x, std::span<const double> y, double mu);

/// ½ Σ_j λ_j ((β − β*)ᵀv_j)² in the eigenbasis of H.
double suboptimality(const RidgeProblem& p, std::span<const double> beta);
/// Q(β) − Q*
double suboptimality_direct(const RidgeProblem& p, std::span<const double> beta);

using IterateObserver = std::function<void(std::size_t t, std::span<const double> iterate)>;

struct GdOptions {
  IterateObserver observer;  // called for t = 0..steps
  std::string init_label = "explicit";
};

/// β_{t+1} = β_t − γ(Hβ_t − b). Steps with γ >= 2/λ₁ are run but flagged.
OptimizerTrace gd_run(const RidgeProblem& p, std::span<const double> beta0, double gamma,
                      std::size_t steps, const GdOptions& opts = {});

/// β_t = β* + V(I − γΛ)^t Vᵀ(β₀ − β*)
Vector gd_closed_form(const RidgeProblem& p, std::span<const double> beta0, double gamma,
                      std::size_t t);

struct PrimalBound {
  double value = 0.0;
  std::size_t r = 0;
  bool flagged = false;  // γζ >= 1: the decaying factor does not decay
};

/// ½[r(ζ)(1 − γζ)^{2t} + (d − r(ζ))]·τζ
PrimalBound primal_bound(const TauProfile& profile, const SpectralDecomposition& spec, double gamma,
                         double zeta, std::size_t t, std::size_t d);

/// Smallest ζ for which the bound dominates the zero-init GD trace at every t,
/// given γ <= 1/λ₁: ζ >= Σρ_j² / (dτ).
double primal_bound_min_zeta(const TauProfile& profile, std::size_t d);

/// (Q(β₀) − Q*)(1 − 2/κ)^{2t}; a reading of the worst-case κ-rate line.
double kappa_envelope(double initial_subopt, double kappa, std::size_t t);

/// Mean squared residual (1/n)‖Xβ − y‖².
double mean_squared_loss(const DenseMatrix& x, std::span<const double> y,
                         std::span<const double> beta);

}  // namespace hopt
