#pragma once

// Eigenfeature statistics of a centered dataset: Z = XV with variances
// σ_j², response covariances c_j = E[Y Z_j] and normalized correlations
// ρ_j² = c_j² / σ_j².

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "hopt/data_io.hpp"
#include "hopt/linalg.hpp"

namespace hopt {

struct SpectralDecomposition {
  ThinSVD svd;  // scaled: X = sqrt(n) U S Vᵀ
  std::size_t n = 0;
  std::size_t d = 0;
  double mu = 0.0;
  Vector z_variances;            // length d, zero past the rank
  Vector response_cov;           // length d
  Vector regularized_variances;  // z_variances + mu
  double response_second_moment = 0.0;  // E[Y²]

  std::size_t rank() const noexcept { return svd.rank(); }
};

SpectralDecomposition decompose(const DenseMatrix& x, std::span<const double> y, double mu,
                                const SvdOptions& opts = {});
SpectralDecomposition decompose(const Dataset& data, double mu, const SvdOptions& opts = {});

/// Z = X V restricted to the rank-r eigenfeatures (n x r).
DenseMatrix eigenfeatures(const SpectralDecomposition& spec, const DenseMatrix& x);

struct FeatureRegularity {
  std::size_t j = 0;
  double sigma2 = 0.0;
  double c2 = 0.0;
  double rho2 = 0.0;   // 0 when the variance is below the rank tolerance
  double ratio = 0.0;  // rho2 / sigma2
  bool counted = false;
};

struct TauProfile {
  std::vector<FeatureRegularity> per_feature;  // all d eigenfeatures
  double tau = 0.0;
  std::size_t argmax = 0;
  double variance_floor = 0.0;  // rank tolerance on σ_j²

  double rho2_sum() const noexcept;
};

/// Features with σ_j² <= rel_tol·σ_1² are excluded from tau.
TauProfile measure_tau(const SpectralDecomposition& spec, double rel_tol = 1e-10);

/// r(ζ) = #{j : σ_j² > ζ}
std::size_t count_above(const SpectralDecomposition& spec, double zeta);
std::size_t count_above(const TauProfile& profile, double zeta);

struct ScatterPoint {
  std::size_t j = 0;
  double log10_h = 0.0;  // log10(σ_j⁴)
  double log10_v = 0.0;  // log10(c_j² / σ_j⁴)
  double sigma2 = 0.0;
  double rho2 = 0.0;
  double ratio = 0.0;
};

struct ScatterTable {
  std::vector<ScatterPoint> points;
  std::size_t omitted = 0;  // zero-variance features, plus zero-correlation ones (log undefined)
};

ScatterTable export_scatter(const TauProfile& profile);
/// Header `j,log10_h,log10_v,sigma2,rho2,ratio`.
void write_scatter_csv(std::ostream& out, const ScatterTable& table);

}  // namespace hopt
