#pragma once

// Naive dense reference computations for the tests. Deliberately written
// without the library's kernels or factorizations so agreement means
// something: plain loops, Gaussian elimination, cyclic Jacobi.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "hopt/data_io.hpp"
#include "hopt/linalg.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major, rows of equal length

inline Mat to_mat(const hopt::DenseMatrix& a) {
  Mat m(a.rows(), Vec(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = a(i, j);
  return m;
}

inline Mat transpose(const Mat& a) {
  Mat t(a.empty() ? 0 : a[0].size(), Vec(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline Mat mul(const Mat& a, const Mat& b) {
  Mat c(a.size(), Vec(b.empty() ? 0 : b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[k].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Vec mul(const Mat& a, const Vec& x) {
  Vec y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec sub(const Vec& a, const Vec& b) {
  Vec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Gaussian elimination with partial pivoting.
inline Vec solve(Mat a, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Cyclic Jacobi; returns (eigenvalues descending, eigenvectors as columns).
inline std::pair<Vec, Mat> jacobi(Mat a) {
  const std::size_t n = a.size();
  Mat v(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
  Vec w(n);
  Mat vs(n, Vec(n));
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = a[idx[k]][idx[k]];
    for (std::size_t i = 0; i < n; ++i) vs[i][k] = v[i][idx[k]];
  }
  return {w, vs};
}

/// Primal ridge pieces: H = XᵀX/n + μI, b = Xᵀy/n.
struct Ridge {
  Mat h;
  Vec b;
  Vec beta_star;

  Ridge(const hopt::DenseMatrix& x, const Vec& y, double mu) {
    const Mat xm = to_mat(x);
    const double n = static_cast<double>(x.rows());
    h = mul(transpose(xm), xm);
    for (std::size_t i = 0; i < h.size(); ++i) {
      for (double& v : h[i]) v /= n;
      h[i][i] += mu;
    }
    b = mul(transpose(xm), y);
    for (double& v : b) v /= n;
    beta_star = solve(h, b);
  }

  double objective(const Vec& beta) const { return 0.5 * dot(beta, mul(h, beta)) - dot(b, beta); }
};

/// Dense dual Hessian G = XXᵀ/(μn²) + I/n.
inline Mat dual_hessian(const hopt::DenseMatrix& x, double mu) {
  const Mat xm = to_mat(x);
  Mat g = mul(xm, transpose(xm));
  const double n = static_cast<double>(x.rows());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (double& v : g[i]) v /= mu * n * n;
    g[i][i] += 1.0 / n;
  }
  return g;
}

/// Dual minimizer from the dense n x n system Gα = y/n.
inline Vec dual_minimizer(const hopt::DenseMatrix& x, const Vec& y, double mu) {
  Vec b(y);
  for (double& v : b) v /= static_cast<double>(y.size());
  return solve(dual_hessian(x, mu), b);
}

/// Small random problem with Gaussian features of varying scale.
inline hopt::Dataset random_problem(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  hopt::DenseMatrix x(n, d);
  Vec w(d);
  for (double& v : w) v = g(rng);
  hopt::Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      x(i, j) = g(rng) / (1.0 + static_cast<double>(j));
      s += x(i, j) * w[j];
    }
    y[i] = s + 0.3 * g(rng);
  }
  return hopt::standardize(hopt::Dataset{std::move(x), std::move(y), {}, hopt::SplitTag::All});
}

}  // namespace oracle
