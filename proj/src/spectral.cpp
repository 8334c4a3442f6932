#include "hopt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hopt/error.hpp"
#include "hopt/kernels.hpp"
#include "hopt/trace.hpp"

namespace hopt {

SpectralDecomposition decompose(const DenseMatrix& x, std::span<const double> y, double mu,
                                const SvdOptions& opts) {
  require_same_size(x.rows(), y.size(), "decompose rows");
  if (!(mu >= 0.0)) throw Error(ErrorKind::InvalidArgument, "mu must be non-negative");
  if (x.rows() == 0) throw Error(ErrorKind::InvalidArgument, "decompose needs at least one row");

  SpectralDecomposition s;
  s.n = x.rows();
  s.d = x.cols();
  s.mu = mu;
  s.svd = thin_svd(x, true, opts);

  const double inv_n = 1.0 / static_cast<double>(s.n);
  s.z_variances.assign(s.d, 0.0);
  s.response_cov.assign(s.d, 0.0);
  const Vector xty = matvec_t(x, y);
  for (std::size_t j = 0; j < s.rank(); ++j) {
    const double sigma = s.svd.singulars[j];
    s.z_variances[j] = sigma * sigma;
    double c = 0.0;
    for (std::size_t k = 0; k < s.d; ++k) c += s.svd.right(k, j) * xty[k];
    s.response_cov[j] = c * inv_n;
  }
  s.regularized_variances = s.z_variances;
  for (double& v : s.regularized_variances) v += mu;
  s.response_second_moment = simd::squared_norm(y) * inv_n;
  return s;
}

SpectralDecomposition decompose(const Dataset& data, double mu, const SvdOptions& opts) {
  return decompose(data.x, data.y, mu, opts);
}

DenseMatrix eigenfeatures(const SpectralDecomposition& spec, const DenseMatrix& x) {
  require_same_size(x.cols(), spec.d, "eigenfeatures columns");
  return matmul(x, spec.svd.right);
}

double TauProfile::rho2_sum() const noexcept {
  double s = 0.0;
  for (const auto& f : per_feature) s += f.rho2;
  return s;
}

TauProfile measure_tau(const SpectralDecomposition& spec, double rel_tol) {
  if (spec.rank() == 0 || spec.z_variances.empty() || spec.z_variances.front() <= 0.0) {
    throw Error(ErrorKind::AllZeroVariance, "all eigenfeatures have zero variance");
  }
  TauProfile p;
  p.variance_floor = rel_tol * spec.z_variances.front();
  p.per_feature.resize(spec.d);
  for (std::size_t j = 0; j < spec.d; ++j) {
    auto& f = p.per_feature[j];
    f.j = j;
    f.sigma2 = spec.z_variances[j];
    f.c2 = spec.response_cov[j] * spec.response_cov[j];
    f.counted = f.sigma2 > p.variance_floor;
    if (!f.counted) continue;
    f.rho2 = f.c2 / f.sigma2;
    f.ratio = f.rho2 / f.sigma2;
    if (f.ratio > p.tau) {
      p.tau = f.ratio;
      p.argmax = j;
    }
  }
  return p;
}

std::size_t count_above(const SpectralDecomposition& spec, double zeta) {
  return static_cast<std::size_t>(std::count_if(spec.z_variances.begin(), spec.z_variances.end(),
                                                [zeta](double s) { return s > zeta; }));
}

std::size_t count_above(const TauProfile& profile, double zeta) {
  return static_cast<std::size_t>(std::count_if(profile.per_feature.begin(),
                                                profile.per_feature.end(),
                                                [zeta](const auto& f) { return f.sigma2 > zeta; }));
}

ScatterTable export_scatter(const TauProfile& profile) {
  ScatterTable t;
  for (const auto& f : profile.per_feature) {
    if (!f.counted || f.c2 <= 0.0) {
      ++t.omitted;
      continue;
    }
    t.points.push_back({f.j, std::log10(f.sigma2 * f.sigma2), std::log10(f.c2 / (f.sigma2 * f.sigma2)),
                        f.sigma2, f.rho2, f.ratio});
  }
  return t;
}

void write_scatter_csv(std::ostream& out, const ScatterTable& table) {
  out << "j,log10_h,log10_v,sigma2,rho2,ratio\n";
  for (const auto& p : table.points) {
    out << p.j << ',' << format_number(p.log10_h) << ',' << format_number(p.log10_v) << ','
        << format_number(p.sigma2) << ',' << format_number(p.rho2) << ',' << format_number(p.ratio)
        << '\n';
  }
}

}  // namespace hopt
