#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "hopt/linalg.hpp"

namespace hopt {

struct SparseEntry {
  std::size_t index;  // 1-based, as in the file
  double value;
};

struct RawRow {
  double label = 0.0;
  std::vector<SparseEntry> features;  // strictly increasing indices
};

struct RawDataset {
  std::vector<RawRow> rows;
  std::size_t dim = 0;  // largest feature index seen
};

enum class SplitTag { Train, Test, All };

struct PreprocessRecord {
  Vector feature_means;
  Vector feature_scales;  // all ones unless features were scaled
  double y_mean = 0.0;
  double y_scale = 1.0;
  bool degenerate_response = false;  // constant training response; y_scale forced to 1
};

struct Dataset {
  DenseMatrix x;  // n x d
  Vector y;
  PreprocessRecord preprocessing;
  SplitTag split_tag = SplitTag::All;

  std::size_t n() const noexcept { return x.rows(); }
  std::size_t d() const noexcept { return x.cols(); }
};

// --- LIBSVM text -------------------------------------------------------------

RawDataset parse_libsvm(std::istream& in);
/// Reads a LIBSVM file; paths ending in ".gz" are decompressed transparently.
RawDataset read_libsvm_file(const std::filesystem::path& path);
/// Writes nonzero entries of `data` in LIBSVM format with round-trip precision.
void write_libsvm(std::ostream& out, const Dataset& data);

/// Densify rows into an n x dim matrix; missing indices are zero.
DenseMatrix densify(const RawDataset& raw);
Vector labels(const RawDataset& raw);

// --- preprocessing -----------------------------------------------------------

/// Statistics of (x, y): column means and the 1/n standard deviation of y.
PreprocessRecord fit_standardization(const DenseMatrix& x, std::span<const double> y);
Dataset apply_standardization(const PreprocessRecord& record, DenseMatrix x, Vector y,
                              SplitTag tag);
/// Refit and apply on a dataset's own values (idempotent on its output).
Dataset standardize(const Dataset& data);

struct SplitDatasets {
  Dataset train;
  Dataset test;
};

/// Shuffle under `split_seed`, split, fit centering/standardization on the
/// training part and apply the same transform to the test part.
SplitDatasets preprocess(const RawDataset& raw, std::uint64_t split_seed, double train_fraction);
/// The same shuffle, split and train-statistics transform on dense data.
SplitDatasets split_dense(const DenseMatrix& x, std::span<const double> y, std::uint64_t split_seed,
                          double train_fraction);
/// Center and standardize the full dataset (no split).
Dataset preprocess_all(const RawDataset& raw);
/// Scale every nonconstant column of an already-centered dataset to unit variance.
Dataset scale_features(const Dataset& data);

// --- synthetic data ----------------------------------------------------------

struct SyntheticSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  Vector spectrum;      // target eigenfeature variances, descending
  Vector correlations;  // target rho_j
  std::uint64_t noise_seed = 0;
};

/// X = sqrt(n) U diag(sigma) Vᵀ with U orthogonal to the constant vector, and
/// y = sqrt(n) U rho + noise with the noise orthogonal to span(1, U) and scaled
/// so that E[Y^2] = 1. Eigenfeature statistics of the result match the spec.
Dataset generate_synthetic(const SyntheticSpec& spec);

/// d variances spaced geometrically from `top` down to `bottom`.
Vector geometric_spectrum(std::size_t d, double top, double bottom);
/// rho_j^2 = tau * s_j * (s_j / s_1)^exponent, so the ratio rho_j^2 / s_j
/// is at most tau and attained by the leading eigenfeature.
Vector bounded_correlations(std::span<const double> spectrum, double tau, double exponent);

// --- binary cache ------------------------------------------------------------

/// Layout: "HOPT1", n and d as little-endian uint64, x row-major then y as
/// little-endian IEEE-754 doubles.
void write_binary(std::ostream& out, const Dataset& data);
Dataset read_binary(std::istream& in);
void write_binary_file(const std::filesystem::path& path, const Dataset& data);
Dataset read_binary_file(const std::filesystem::path& path);

}  // namespace hopt
