#include "hopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hopt/error.hpp"
#include "hopt/kernels.hpp"

namespace hopt {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  require_same_size(data_.size(), rows * cols, "DenseMatrix entries");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    require_same_size(row.size(), c, "from_rows row length");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> values) {
  require_same_size(values.size(), rows_, "set_column");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::max_abs() const noexcept { return hopt::max_abs(data_); }

double DenseMatrix::frobenius() const noexcept { return std::sqrt(simd::squared_norm(data_)); }

bool DenseMatrix::all_finite() const noexcept { return hopt::all_finite(data_); }

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_size(a.cols(), b.rows(), "matmul inner dimension");
  const DenseMatrix bt = b.transpose();
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = simd::dot(a.row(i), bt.row(j));
  return c;
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  require_same_size(a.cols(), x.size(), "matvec");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = simd::dot(a.row(i), x);
  return out;
}

Vector matvec_t(const DenseMatrix& a, std::span<const double> x) {
  require_same_size(a.rows(), x.size(), "matvec_t");
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (x[i] != 0.0) simd::axpy(x[i], a.row(i), out);
  }
  return out;
}

DenseMatrix gram(const DenseMatrix& x, double scale) {
  const DenseMatrix xt = x.transpose();
  const std::size_t d = x.cols();
  DenseMatrix g(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j; k < d; ++k) {
      const double v = scale * simd::dot(xt.row(j), xt.row(k));
      g(j, k) = v;
      g(k, j) = v;
    }
  }
  return g;
}

DenseMatrix outer_gram(const DenseMatrix& x, double scale) {
  const std::size_t n = x.rows();
  DenseMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = scale * simd::dot(x.row(i), x.row(j));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

DenseMatrix add_identity(DenseMatrix a, double shift) {
  require_same_size(a.rows(), a.cols(), "add_identity on non-square matrix");
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += shift;
  return a;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  return simd::dot(a, b);
}

double norm2(std::span<const double> a) { return std::sqrt(simd::squared_norm(a)); }

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "subtract");
  Vector out(a.begin(), a.end());
  simd::axpy(-1.0, b, out);
  return out;
}

Vector add_scaled(std::span<const double> a, double alpha, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "add_scaled");
  Vector out(a.begin(), a.end());
  simd::axpy(alpha, b, out);
  return out;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

SymEig sym_eig(const DenseMatrix& input, const EigOptions& opts) {
  const std::size_t n = input.rows();
  require_same_size(n, input.cols(), "sym_eig on non-square matrix");
  if (!input.all_finite()) throw Error(ErrorKind::NonFinite, "sym_eig input has NaN/Inf");

  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double asym = std::abs(input(i, j) - input(j, i));
      if (asym > opts.symmetry_tol) {
        throw Error(ErrorKind::NonSymmetric, "asymmetry " + std::to_string(asym) + " at (" +
                                                 std::to_string(i) + "," + std::to_string(j) + ")");
      }
      a(i, j) = 0.5 * (input(i, j) + input(j, i));
    }
  }

  DenseMatrix v = DenseMatrix::identity(n);
  const double target = opts.convergence_rel * a.frobenius();

  auto off_diagonal = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < opts.max_sweeps && off_diagonal() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = a(src, src);
    // fix the sign so the largest-magnitude component is positive
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v(i, src)) > std::abs(v(arg, src))) arg = i;
    const double sign = v(arg, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = sign * v(i, src);
  }
  return out;
}

ThinSVD thin_svd(const DenseMatrix& x, bool scaled, const SvdOptions& opts) {
  if (!x.all_finite()) throw Error(ErrorKind::NonFinite, "thin_svd input has NaN/Inf");
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  ThinSVD out;
  out.scaled = scaled;
  if (n == 0 || d == 0) {
    out.left = DenseMatrix(n, 0);
    out.right = DenseMatrix(d, 0);
    return out;
  }
  const double factor = scaled ? std::sqrt(static_cast<double>(n)) : 1.0;
  const double gram_scale = 1.0 / (factor * factor);
  const bool feature_side = d <= n;

  const SymEig eig = sym_eig(feature_side ? gram(x, gram_scale) : outer_gram(x, gram_scale), opts.eig);
  const std::size_t m = eig.eigenvalues.size();
  const double top = std::max(eig.eigenvalues.front(), 0.0);
  // Eigenvalues of the Gram matrix carry an absolute error of roughly
  // eps * m * top, which bounds the rank the Gram route can resolve.
  const double noise_floor = 100.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(m) * top;
  const double sigma_floor = opts.rank_tol * std::sqrt(top);

  std::size_t rank = 0;
  while (rank < m && eig.eigenvalues[rank] > noise_floor &&
         std::sqrt(eig.eigenvalues[rank]) > sigma_floor) {
    ++rank;
  }

  out.singulars.resize(rank);
  out.left = DenseMatrix(n, rank);
  out.right = DenseMatrix(d, rank);
  for (std::size_t k = 0; k < rank; ++k) {
    const double sigma = std::sqrt(eig.eigenvalues[k]);
    out.singulars[k] = sigma;
    const Vector basis = eig.eigenvectors.column(k);
    Vector other = feature_side ? matvec(x, basis) : matvec_t(x, basis);
    simd::scale(1.0 / (factor * sigma), other);
    if (feature_side) {
      out.right.set_column(k, basis);
      out.left.set_column(k, other);
    } else {
      out.left.set_column(k, basis);
      out.right.set_column(k, other);
    }
  }
  return out;
}

DenseMatrix reconstruct(const ThinSVD& svd) {
  const std::size_t n = svd.left.rows();
  const std::size_t d = svd.right.rows();
  const double factor = svd.scaled ? std::sqrt(static_cast<double>(n)) : 1.0;
  DenseMatrix us = svd.left;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < svd.rank(); ++k) us(i, k) *= factor * svd.singulars[k];
  if (svd.rank() == 0) return DenseMatrix(n, d);
  return matmul(us, svd.right.transpose());
}

Cholesky::Cholesky(const DenseMatrix& a) : lower_(a.rows(), a.rows()) {
  const std::size_t n = a.rows();
  require_same_size(n, a.cols(), "Cholesky on non-square matrix");
  if (!a.all_finite()) throw Error(ErrorKind::NonFinite, "Cholesky input has NaN/Inf");
  for (std::size_t j = 0; j < n; ++j) {
    auto lj = lower_.row(j).first(j);
    const double pivot = a(j, j) - simd::squared_norm(lj);
    if (!(pivot > 0.0)) {
      throw Error(ErrorKind::NotPositiveDefinite,
                  "pivot " + std::to_string(pivot) + " at column " + std::to_string(j));
    }
    const double ljj = std::sqrt(pivot);
    lower_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      lower_(i, j) = (a(i, j) - simd::dot(lower_.row(i).first(j), lj)) / ljj;
    }
  }
}

Vector Cholesky::solve(std::span<const double> b) const {
  const std::size_t n = lower_.rows();
  require_same_size(b.size(), n, "Cholesky::solve");
  Vector z(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = (z[i] - simd::dot(lower_.row(i).first(i), std::span<const double>(z).first(i))) /
           lower_(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = z[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lower_(k, ii) * z[k];
    z[ii] = s / lower_(ii, ii);
  }
  return z;
}

Vector solve_spd(const DenseMatrix& a, std::span<const double> b) { return Cholesky(a).solve(b); }

namespace {

// Project `v` against the first `count` columns of `q` (stored transposed as rows).
void project_out(const DenseMatrix& qt, std::size_t count, std::span<double> v) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < count; ++k) {
      const double c = simd::dot(qt.row(k), v);
      simd::axpy(-c, qt.row(k), v);
    }
  }
}

}  // namespace

DenseMatrix orthonormalize_columns(const DenseMatrix& a, double drop_tol) {
  const std::size_t n = a.rows();
  DenseMatrix qt(a.cols(), n);
  std::size_t kept = 0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    Vector v = a.column(j);
    const double original = norm2(v);
    if (original == 0.0) continue;
    project_out(qt, kept, v);
    const double residual = norm2(v);
    if (residual <= drop_tol * original) continue;
    simd::scale(1.0 / residual, v);
    std::copy(v.begin(), v.end(), qt.row(kept).begin());
    ++kept;
  }
  DenseMatrix q(n, kept);
  for (std::size_t k = 0; k < kept; ++k) q.set_column(k, qt.row(k));
  return q;
}

DenseMatrix complete_basis(const DenseMatrix& basis, unsigned long long seed) {
  const std::size_t n = basis.rows();
  DenseMatrix qt(n, n);
  std::size_t kept = 0;
  for (std::size_t k = 0; k < basis.cols(); ++k) {
    const Vector col = basis.column(k);
    std::copy(col.begin(), col.end(), qt.row(kept++).begin());
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  while (kept < n) {
    Vector v(n);
    for (double& e : v) e = normal(rng);
    project_out(qt, kept, v);
    const double r = norm2(v);
    if (r < 1e-6) continue;
    simd::scale(1.0 / r, v);
    std::copy(v.begin(), v.end(), qt.row(kept++).begin());
  }
  return qt.transpose();
}

}  // namespace hopt
