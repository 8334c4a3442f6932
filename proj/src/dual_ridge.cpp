#include "hopt/dual_ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "hopt/error.hpp"
#include "hopt/kernels.hpp"
#include "hopt/rcdm.hpp"

namespace hopt {

struct DualRidgeProblem::Shared {
  DenseMatrix x;
  Vector y;
  Vector row_sq_norms;
  DenseMatrix gram;  // XᵀX
  std::once_flag svd_once;
  ThinSVD svd;
};

DualRidgeProblem::DualRidgeProblem(const DenseMatrix& x, std::span<const double> y, double mu)
    : shared_(std::make_shared<Shared>()), mu_(mu) {
  require_same_size(x.rows(), y.size(), "dual rows");
  if (x.rows() == 0) throw Error(ErrorKind::InvalidArgument, "dual problem needs n >= 1");
  if (!x.all_finite() || !all_finite(y)) throw Error(ErrorKind::NonFinite, "non-finite data");
  shared_->x = x;
  shared_->y.assign(y.begin(), y.end());
  shared_->row_sq_norms.resize(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) shared_->row_sq_norms[i] = simd::squared_norm(x.row(i));
  shared_->gram = gram(x);
  build();
}

DualRidgeProblem::DualRidgeProblem(std::shared_ptr<Shared> shared, double mu)
    : shared_(std::move(shared)), mu_(mu) {
  build();
}

DualRidgeProblem DualRidgeProblem::with_mu(double mu) const { return DualRidgeProblem(shared_, mu); }

void DualRidgeProblem::build() {
  if (!(mu_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "dual problem needs mu > 0");
  const double nd = static_cast<double>(n());
  hessian_diag_.resize(n());
  for (std::size_t r = 0; r < n(); ++r) {
    hessian_diag_[r] = shared_->row_sq_norms[r] / (mu_ * nd * nd) + 1.0 / nd;
  }
  linear_ = shared_->y;
  simd::scale(1.0 / nd, linear_);
  reduced_ = std::make_shared<const Cholesky>(add_identity(shared_->gram, nd * mu_));
  minimizer_ = solve(linear_);
  optimum_ = -0.5 * dot(linear_, minimizer_);
}

std::size_t DualRidgeProblem::n() const noexcept { return shared_->x.rows(); }
std::size_t DualRidgeProblem::d() const noexcept { return shared_->x.cols(); }
const DenseMatrix& DualRidgeProblem::x() const noexcept { return shared_->x; }
const Vector& DualRidgeProblem::y() const noexcept { return shared_->y; }
const Vector& DualRidgeProblem::row_sq_norms() const noexcept { return shared_->row_sq_norms; }

Vector DualRidgeProblem::xt_times(std::span<const double> alpha) const {
  require_same_size(alpha.size(), n(), "dual vector length");
  return matvec_t(shared_->x, alpha);
}

Vector DualRidgeProblem::hessian_times(std::span<const double> alpha) const {
  const double nd = static_cast<double>(n());
  Vector out = matvec(shared_->x, xt_times(alpha));
  simd::scale(1.0 / (mu_ * nd * nd), out);
  simd::axpy(1.0 / nd, alpha, out);
  return out;
}

DenseMatrix DualRidgeProblem::dense_hessian() const {
  const double nd = static_cast<double>(n());
  return add_identity(outer_gram(shared_->x, 1.0 / (mu_ * nd * nd)), 1.0 / nd);
}

Vector DualRidgeProblem::solve(std::span<const double> rhs) const {
  require_same_size(rhs.size(), n(), "dual solve rhs");
  const double nd = static_cast<double>(n());
  // (XXᵀ/(μn) + I)α = n·rhs  =>  α = z − X(XᵀX + nμI)⁻¹Xᵀz with z = n·rhs
  auto woodbury = [&](std::span<const double> r) {
    Vector z(r.begin(), r.end());
    simd::scale(nd, z);
    const Vector w = reduced_->solve(matvec_t(shared_->x, z));
    simd::axpy(-1.0, matvec(shared_->x, w), z);
    return z;
  };
  Vector alpha = woodbury(rhs);
  Vector residual(rhs.begin(), rhs.end());
  simd::axpy(-1.0, hessian_times(alpha), residual);
  simd::axpy(1.0, woodbury(residual), alpha);
  return alpha;
}

double DualRidgeProblem::objective(std::span<const double> alpha) const {
  const double nd = static_cast<double>(n());
  const Vector v = xt_times(alpha);
  return 0.5 * (simd::squared_norm(v) / (mu_ * nd * nd) + simd::squared_norm(alpha) / nd) -
         simd::dot(linear_, alpha);
}

Vector DualRidgeProblem::gradient(std::span<const double> alpha) const {
  Vector g = hessian_times(alpha);
  simd::axpy(-1.0, linear_, g);
  return g;
}

double DualRidgeProblem::suboptimality(std::span<const double> alpha) const {
  require_same_size(alpha.size(), n(), "dual vector length");
  const double nd = static_cast<double>(n());
  const Vector diff = subtract(alpha, minimizer_);
  const Vector v = matvec_t(shared_->x, diff);
  return 0.5 * (simd::squared_norm(v) / (mu_ * nd * nd) + simd::squared_norm(diff) / nd);
}

const ThinSVD& DualRidgeProblem::svd() const {
  std::call_once(shared_->svd_once, [this] { shared_->svd = thin_svd(shared_->x, true); });
  return shared_->svd;
}

double DualRidgeProblem::hessian_norm() const {
  const auto& s = svd();
  const double top = s.rank() ? s.singulars.front() : 0.0;
  return (top * top / mu_ + 1.0) / static_cast<double>(n());
}

double dual_objective(const DualRidgeProblem& p, std::span<const double> alpha) {
  return p.objective(alpha);
}

Vector dual_minimizer(const DualRidgeProblem& p) { return p.solve(p.linear()); }

Vector dual_minimizer_dense(const DualRidgeProblem& p) {
  return solve_spd(p.dense_hessian(), p.linear());
}

double default_nu(double mu) { return 0.25 * std::sqrt(mu); }

HomotopicInit homotopic_init(const DualRidgeProblem& p, double nu, const HomotopicOptions& opts) {
  if (!(nu > 0.0)) throw Error(ErrorKind::InvalidArgument, "nu must be positive");
  HomotopicInit h;
  h.nu = nu;
  h.method = opts.method;
  const DualRidgeProblem pn = p.with_mu(nu);
  if (opts.method == HomotopicMethod::Direct) {
    h.alpha0 = pn.minimizer();
    return h;
  }
  RcdmConfig cfg;
  cfg.step_rule = StepRule::Diagonal;
  cfg.sampling = Sampling::Permutation;
  cfg.epochs = opts.max_epochs;
  cfg.seed = opts.seed;
  cfg.stop_rel_subopt = opts.rel_tolerance;
  RcdmResult run = rcdm_run(pn, cfg);
  h.alpha0 = std::move(run.alpha);
  h.epochs = run.trace.steps.empty() ? 0 : run.trace.steps.back().epoch;
  return h;
}

DualSplit dual_suboptimality_split(const DualRidgeProblem& p, std::span<const double> alpha) {
  require_same_size(alpha.size(), p.n(), "dual vector length");
  const ThinSVD& s = p.svd();
  const double nd = static_cast<double>(p.n());
  Vector diff = subtract(alpha, p.minimizer());
  const Vector coords = matvec_t(s.left, diff);
  DualSplit out;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double s2 = s.singulars[i] * s.singulars[i];
    out.image_part += (s2 / p.mu() + 1.0) * coords[i] * coords[i];
  }
  out.image_part /= 2.0 * nd;
  simd::axpy(-1.0, matvec(s.left, coords), diff);
  out.kernel_part = simd::squared_norm(diff) / (2.0 * nd);
  return out;
}

Vector dual_init_gap(const SpectralDecomposition& spec, double mu, double nu) {
  Vector gap(spec.d, 0.0);
  const double nd = static_cast<double>(spec.n);
  for (std::size_t i = 0; i < spec.rank(); ++i) {
    const double s2 = spec.z_variances[i];
    if (s2 <= 0.0) continue;
    const double rho2 = spec.response_cov[i] * spec.response_cov[i] / s2;
    const double f = (mu - nu) * s2 / ((s2 + mu) * (s2 + nu));
    gap[i] = nd * rho2 * f * f;
  }
  return gap;
}

double homotopic_distance_bound(const TauProfile& profile, const SpectralDecomposition& spec,
                                double mu, double nu, double zeta, std::size_t n, std::size_t d) {
  if (!(zeta >= 0.0)) throw Error(ErrorKind::ZetaOutOfRange, "zeta must be non-negative");
  const std::size_t r = std::min(d, count_above(spec, zeta));
  return (mu - nu) * (mu - nu) / nu * static_cast<double>(d - r) * static_cast<double>(n) *
         profile.tau * zeta;
}

double homotopic_distance_min_zeta(const SpectralDecomposition& spec, double mu, double nu) {
  double need = 0.0;
  for (double s2 : spec.z_variances) {
    if (s2 <= 0.0) continue;
    const double den = (s2 + mu) * (s2 + nu);
    need += s2 * s2 * s2 / (den * den);
  }
  need *= nu;
  if (need <= 0.0) return 0.0;

  Vector sorted = spec.z_variances;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t d = sorted.size();
  // On [σ_k², σ_{k-1}²) exactly k variances exceed ζ; (d − k)ζ is non-decreasing in ζ.
  for (std::size_t k = d; k-- > 0;) {
    const double upper = k == 0 ? std::numeric_limits<double>::infinity() : sorted[k - 1];
    const double candidate = std::max(sorted[k], need / static_cast<double>(d - k));
    if (candidate < upper) return candidate;
  }
  return std::numeric_limits<double>::infinity();
}

Vector dual_to_primal(const DualRidgeProblem& p, std::span<const double> alpha) {
  Vector beta = p.xt_times(alpha);
  simd::scale(1.0 / (static_cast<double>(p.n()) * p.mu()), beta);
  return beta;
}

}  // namespace hopt
