#pragma once

// Dual ridge: Q_μ(α) = ½αᵀGα − bᵀα with G = XXᵀ/(μn²) + I/n and b = y/n.
// G is never formed except on request; products go through v = Xᵀα.

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "hopt/data_io.hpp"
#include "hopt/linalg.hpp"
#include "hopt/spectral.hpp"

namespace hopt {

class DualRidgeProblem {
 public:
  DualRidgeProblem(const DenseMatrix& x, std::span<const double> y, double mu);
  static DualRidgeProblem from_dataset(const Dataset& data, double mu) {
    return DualRidgeProblem(data.x, data.y, mu);
  }
  /// Same data at a different regularizer; shares the data and its SVD.
  DualRidgeProblem with_mu(double mu) const;

  std::size_t n() const noexcept;
  std::size_t d() const noexcept;
  double mu() const noexcept { return mu_; }
  const DenseMatrix& x() const noexcept;
  const Vector& y() const noexcept;
  const Vector& row_sq_norms() const noexcept;
  const Vector& hessian_diag() const noexcept { return hessian_diag_; }
  const Vector& linear() const noexcept { return linear_; }

  Vector xt_times(std::span<const double> alpha) const;
  Vector hessian_times(std::span<const double> alpha) const;
  DenseMatrix dense_hessian() const;

  /// G⁻¹ rhs through the d x d system XᵀX + nμI, with one refinement step.
  Vector solve(std::span<const double> rhs) const;

  const Vector& minimizer() const noexcept { return minimizer_; }
  /// Q*_μ = −½ bᵀα*
  double optimum() const noexcept { return optimum_; }

  double objective(std::span<const double> alpha) const;
  Vector gradient(std::span<const double> alpha) const;
  /// ½(α − α*)ᵀG(α − α*), free of the cancellation in Q(α) − Q*.
  double suboptimality(std::span<const double> alpha) const;

  /// Scaled thin SVD of X, computed on first use and shared across with_mu copies.
  const ThinSVD& svd() const;
  /// ‖G‖ = (σ₁²/μ + 1)/n
  double hessian_norm() const;

 private:
  struct Shared;
  DualRidgeProblem(std::shared_ptr<Shared> shared, double mu);
  void build();

  std::shared_ptr<Shared> shared_;
  double mu_ = 0.0;
  Vector hessian_diag_;
  Vector linear_;
  std::shared_ptr<const Cholesky> reduced_;  // XᵀX + nμI
  Vector minimizer_;
  double optimum_ = 0.0;
};

double dual_objective(const DualRidgeProblem& p, std::span<const double> alpha);
/// Woodbury route: α* = y − Xβ* with β* = (XᵀX + nμI)⁻¹Xᵀy.
Vector dual_minimizer(const DualRidgeProblem& p);
/// Dense n x n Cholesky on G; the reference path for small n.
Vector dual_minimizer_dense(const DualRidgeProblem& p);

/// ν = ¼√μ
double default_nu(double mu);

enum class HomotopicMethod { Direct, Rcdm };

struct HomotopicOptions {
  HomotopicMethod method = HomotopicMethod::Direct;
  double rel_tolerance = 1e-6;  // RCDM stop: (Q_ν(α) − Q*_ν) <= tol·(Q_ν(0) − Q*_ν)
  std::size_t max_epochs = 10000;
  std::uint64_t seed = 0;
};

struct HomotopicInit {
  double nu = 0.0;
  Vector alpha0;
  HomotopicMethod method = HomotopicMethod::Direct;
  std::size_t epochs = 0;  // 0 for a direct solve
};

HomotopicInit homotopic_init(const DualRidgeProblem& p, double nu, const HomotopicOptions& opts = {});

struct DualSplit {
  double image_part = 0.0;
  double kernel_part = 0.0;
  double total() const noexcept { return image_part + kernel_part; }
};

/// Splits ½ΔᵀGΔ along range(U) and its complement. Image coordinate i
/// carries weight (σ_i²/μ + 1)/(2n), the kernel block 1/(2n).
DualSplit dual_suboptimality_split(const DualRidgeProblem& p, std::span<const double> alpha);

/// Per image coordinate i: (u_iᵀ(α*_ν − α*_μ))². With ρ_i² = c_i²/σ_i² this is
/// n·ρ_i²·((μ − ν)σ_i² / ((σ_i² + μ)(σ_i² + ν)))². Zero past the rank.
Vector dual_init_gap(const SpectralDecomposition& spec, double mu, double nu);

/// ((μ − ν)²/ν)·(d − r(ζ))·n·τ·ζ
double homotopic_distance_bound(const TauProfile& profile, const SpectralDecomposition& spec,
                                double mu, double nu, double zeta, std::size_t n, std::size_t d);

/// Smallest ζ with (d − r(ζ))ζ >= ν Σ_i σ_i⁶/((σ_i² + μ)²(σ_i² + ν)²). Above it the
/// bound holds for every spectrum-compatible τ-bounded response.
double homotopic_distance_min_zeta(const SpectralDecomposition& spec, double mu, double nu);

/// β = Xᵀα / (nμ)
Vector dual_to_primal(const DualRidgeProblem& p, std::span<const double> alpha);

}  // namespace hopt
