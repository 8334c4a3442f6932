#pragma once

// Dense linear algebra for desk-scale problems: row-major matrices,
// cyclic-Jacobi symmetric eigendecomposition, Gram-based thin SVD and
// Cholesky solves.

#include <cstddef>
#include <span>
#include <vector>

namespace hopt {

using Vector = std::vector<double>;

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  DenseMatrix transpose() const;
  double max_abs() const noexcept;
  double frobenius() const noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// --- products ---------------------------------------------------------------

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// a * x
Vector matvec(const DenseMatrix& a, std::span<const double> x);
/// aᵀ * x
Vector matvec_t(const DenseMatrix& a, std::span<const double> x);
/// xᵀx * scale
DenseMatrix gram(const DenseMatrix& x, double scale = 1.0);
/// x xᵀ * scale
DenseMatrix outer_gram(const DenseMatrix& x, double scale = 1.0);
DenseMatrix add_identity(DenseMatrix a, double shift);

// --- vector helpers ---------------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector add_scaled(std::span<const double> a, double alpha, std::span<const double> b);
bool all_finite(std::span<const double> a);

// --- decompositions ---------------------------------------------------------

struct EigOptions {
  double symmetry_tol = 1e-10;       // absolute
  double convergence_rel = 1e-12;    // off-diagonal Frobenius vs ‖A‖_F
  int max_sweeps = 100;
};

struct SymEig {
  Vector eigenvalues;        // descending
  DenseMatrix eigenvectors;  // columns, orthonormal
};

SymEig sym_eig(const DenseMatrix& a, const EigOptions& opts = {});

struct SvdOptions {
  double rank_tol = 1e-10;  // relative to the largest singular value
  EigOptions eig;
};

struct ThinSVD {
  DenseMatrix left;      // n x r
  Vector singulars;      // r, descending
  DenseMatrix right;     // d x r
  bool scaled = false;   // X = sqrt(n) U S Vᵀ when set
  std::size_t rank() const noexcept { return singulars.size(); }
};

ThinSVD thin_svd(const DenseMatrix& x, bool scaled, const SvdOptions& opts = {});

/// Reconstruct X from its factors (including the sqrt(n) factor when scaled).
DenseMatrix reconstruct(const ThinSVD& svd);

class Cholesky {
 public:
  explicit Cholesky(const DenseMatrix& a);
  Vector solve(std::span<const double> b) const;
  std::size_t size() const noexcept { return lower_.rows(); }

 private:
  DenseMatrix lower_;
};

Vector solve_spd(const DenseMatrix& a, std::span<const double> b);

/// Orthonormalize the columns of `a` (modified Gram-Schmidt, two passes).
/// Columns whose residual norm drops below `drop_tol` times their original
/// norm are discarded.
DenseMatrix orthonormalize_columns(const DenseMatrix& a, double drop_tol = 1e-10);

/// Extend the orthonormal columns of `basis` (n x r) to a full n x n
/// orthonormal matrix. The new columns come from Gram-Schmidt on seeded
/// Gaussian vectors, so the result is deterministic for a given seed.
DenseMatrix complete_basis(const DenseMatrix& basis, unsigned long long seed);

}  // namespace hopt
