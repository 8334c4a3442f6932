#include "hopt/data_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "hopt/error.hpp"
#include "hopt/kernels.hpp"

namespace hopt {
namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

bool parse_real(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

bool parse_index(std::string_view tok, std::size_t& out) {
  if (tok.empty()) return false;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::string read_gzip(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  int got = 0;
  while ((got = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(got));
  const bool failed = got < 0;
  gzclose(f);
  if (failed) throw Error(ErrorKind::IoError, "gzip decode failed for " + path.string());
  return out;
}

// Fisher-Yates with the raw engine output so shuffles do not depend on the
// standard library's distribution implementations.
void shuffle_indices(std::vector<std::size_t>& idx, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw Error(ErrorKind::IoError, "truncated binary dataset");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

constexpr std::string_view kMagic = "HOPT1";

}  // namespace

RawDataset parse_libsvm(std::istream& in) {
  RawDataset raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view rest(line);
    auto next_token = [&rest]() -> std::string_view {
      const auto start = rest.find_first_not_of(" \t");
      if (start == std::string_view::npos) {
        rest = {};
        return {};
      }
      rest.remove_prefix(start);
      const auto end = rest.find_first_of(" \t");
      std::string_view tok = rest.substr(0, end);
      rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
      return tok;
    };

    std::string_view tok = next_token();
    if (tok.empty()) continue;

    RawRow row;
    if (!parse_real(tok, row.label)) throw ParseError(line_no, "bad label '" + std::string(tok) + "'");
    if (!std::isfinite(row.label)) throw ParseError(line_no, "non-finite label");

    std::size_t last = 0;
    while (!(tok = next_token()).empty()) {
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "expected index:value, got '" + std::string(tok) + "'");
      }
      std::size_t index = 0;
      double value = 0.0;
      if (!parse_index(tok.substr(0, colon), index) || index == 0) {
        throw ParseError(line_no, "bad feature index in '" + std::string(tok) + "'");
      }
      if (!parse_real(tok.substr(colon + 1), value)) {
        throw ParseError(line_no, "bad feature value in '" + std::string(tok) + "'");
      }
      if (!std::isfinite(value)) throw ParseError(line_no, "non-finite feature value");
      if (index <= last) {
        throw ParseError(line_no, "non-increasing index " + std::to_string(index) + " after " +
                                      std::to_string(last));
      }
      last = index;
      row.features.push_back({index, value});
    }
    raw.dim = std::max(raw.dim, last);
    raw.rows.push_back(std::move(row));
  }
  return raw;
}

RawDataset read_libsvm_file(const std::filesystem::path& path) {
  if (path.extension() == ".gz") {
    std::istringstream in(read_gzip(path));
    return parse_libsvm(in);
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return parse_libsvm(in);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  for (std::size_t i = 0; i < data.n(); ++i) {
    out << format_double(data.y[i]);
    const auto row = data.x.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] != 0.0) out << ' ' << (j + 1) << ':' << format_double(row[j]);
    }
    out << '\n';
  }
}

DenseMatrix densify(const RawDataset& raw) {
  DenseMatrix x(raw.rows.size(), raw.dim);
  for (std::size_t i = 0; i < raw.rows.size(); ++i)
    for (const auto& e : raw.rows[i].features) x(i, e.index - 1) = e.value;
  return x;
}

Vector labels(const RawDataset& raw) {
  Vector y(raw.rows.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = raw.rows[i].label;
  return y;
}

PreprocessRecord fit_standardization(const DenseMatrix& x, std::span<const double> y) {
  require_same_size(x.rows(), y.size(), "fit_standardization rows");
  const std::size_t n = x.rows();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "cannot standardize an empty dataset");
  const double inv_n = 1.0 / static_cast<double>(n);

  PreprocessRecord rec;
  rec.feature_means.assign(x.cols(), 0.0);
  rec.feature_scales.assign(x.cols(), 1.0);
  for (std::size_t i = 0; i < n; ++i) simd::axpy(inv_n, x.row(i), rec.feature_means);

  rec.y_mean = std::accumulate(y.begin(), y.end(), 0.0) * inv_n;
  double var = 0.0;
  for (double v : y) var += (v - rec.y_mean) * (v - rec.y_mean);
  var *= inv_n;
  const double scale = std::sqrt(var);
  if (!(scale > 1e-12 * std::max(1.0, std::abs(rec.y_mean)))) {
    rec.y_scale = 1.0;
    rec.degenerate_response = true;
  } else {
    rec.y_scale = scale;
  }
  return rec;
}

Dataset apply_standardization(const PreprocessRecord& record, DenseMatrix x, Vector y,
                              SplitTag tag) {
  require_same_size(x.cols(), record.feature_means.size(), "standardization feature count");
  require_same_size(x.rows(), y.size(), "standardization rows");
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = (row[j] - record.feature_means[j]) / record.feature_scales[j];
    }
  }
  for (double& v : y) v = (v - record.y_mean) / record.y_scale;
  return Dataset{std::move(x), std::move(y), record, tag};
}

Dataset standardize(const Dataset& data) {
  PreprocessRecord rec = fit_standardization(data.x, data.y);
  return apply_standardization(rec, data.x, data.y, data.split_tag);
}

SplitDatasets split_dense(const DenseMatrix& full, std::span<const double> y_full,
                          std::uint64_t split_seed, double train_fraction) {
  require_same_size(full.rows(), y_full.size(), "split rows");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "train_fraction must lie in (0, 1)");
  }
  const std::size_t n = full.rows();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 rows to split");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle_indices(order, split_seed);

  const auto wanted = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  const std::size_t n_train = std::clamp<std::size_t>(wanted, 1, n);

  auto take = [&](std::size_t begin, std::size_t end) {
    DenseMatrix x(end - begin, full.cols());
    Vector y(end - begin);
    for (std::size_t k = begin; k < end; ++k) {
      const auto src = full.row(order[k]);
      std::copy(src.begin(), src.end(), x.row(k - begin).begin());
      y[k - begin] = y_full[order[k]];
    }
    return std::pair{std::move(x), std::move(y)};
  };

  auto [x_train, y_train] = take(0, n_train);
  auto [x_test, y_test] = take(n_train, n);
  const PreprocessRecord rec = fit_standardization(x_train, y_train);
  return SplitDatasets{
      apply_standardization(rec, std::move(x_train), std::move(y_train), SplitTag::Train),
      apply_standardization(rec, std::move(x_test), std::move(y_test), SplitTag::Test)};
}

SplitDatasets preprocess(const RawDataset& raw, std::uint64_t split_seed, double train_fraction) {
  if (raw.rows.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 rows to split");
  return split_dense(densify(raw), labels(raw), split_seed, train_fraction);
}

Dataset preprocess_all(const RawDataset& raw) {
  if (raw.rows.empty()) throw Error(ErrorKind::InvalidArgument, "dataset has no rows");
  DenseMatrix x = densify(raw);
  Vector y = labels(raw);
  const PreprocessRecord rec = fit_standardization(x, y);
  return apply_standardization(rec, std::move(x), std::move(y), SplitTag::All);
}

Dataset scale_features(const Dataset& data) {
  Dataset out = data;
  const std::size_t n = data.n();
  const double inv_n = 1.0 / static_cast<double>(n);
  Vector scales(data.d(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.x.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) scales[j] += row[j] * row[j];
  }
  for (double& s : scales) {
    s = std::sqrt(s * inv_n);
    if (!(s > 1e-12)) s = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.x.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] /= scales[j];
  }
  if (out.preprocessing.feature_scales.size() != scales.size()) {
    out.preprocessing.feature_scales.assign(scales.size(), 1.0);
  }
  for (std::size_t j = 0; j < scales.size(); ++j) out.preprocessing.feature_scales[j] *= scales[j];
  return out;
}

Vector geometric_spectrum(std::size_t d, double top, double bottom) {
  if (!(top >= bottom && bottom > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "geometric spectrum needs top >= bottom > 0");
  }
  Vector s(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double frac = d > 1 ? static_cast<double>(j) / static_cast<double>(d - 1) : 0.0;
    s[j] = top * std::pow(bottom / top, frac);
  }
  return s;
}

Vector bounded_correlations(std::span<const double> spectrum, double tau, double exponent) {
  Vector rho(spectrum.size(), 0.0);
  if (spectrum.empty()) return rho;
  const double top = spectrum.front();
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    if (spectrum[j] <= 0.0) continue;
    rho[j] = std::sqrt(tau * spectrum[j] * std::pow(spectrum[j] / top, exponent));
  }
  return rho;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  const std::size_t n = spec.n;
  const std::size_t d = spec.d;
  require_same_size(spec.spectrum.size(), d, "synthetic spectrum length");
  require_same_size(spec.correlations.size(), d, "synthetic correlations length");
  if (n <= d + 1) throw Error(ErrorKind::InvalidArgument, "synthetic data needs n > d + 1");

  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double s = spec.spectrum[j];
    const double r = spec.correlations[j];
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorKind::InfeasibleSpec, "negative variance");
    if (j > 0 && s > spec.spectrum[j - 1]) {
      throw Error(ErrorKind::InfeasibleSpec, "spectrum must be sorted descending");
    }
    if (!(r * r <= 1.0)) throw Error(ErrorKind::InfeasibleSpec, "|rho_j| must be at most 1");
    if (s == 0.0 && r != 0.0) {
      throw Error(ErrorKind::InfeasibleSpec, "zero-variance eigenfeature cannot correlate with y");
    }
    total += r * r;
  }
  if (total > 1.0 + 1e-12) {
    throw Error(ErrorKind::InfeasibleSpec,
                "sum of rho_j^2 = " + std::to_string(total) + " exceeds the unit response variance");
  }

  std::mt19937_64 rng(spec.noise_seed);
  std::normal_distribution<double> normal;

  DenseMatrix basis;
  while (basis.cols() != d + 1) {
    DenseMatrix g(n, d + 1);
    for (std::size_t i = 0; i < n; ++i) {
      g(i, 0) = 1.0;
      for (std::size_t j = 1; j <= d; ++j) g(i, j) = normal(rng);
    }
    basis = orthonormalize_columns(g);
  }
  DenseMatrix rot;
  while (rot.cols() != d) {
    DenseMatrix g(d, d);
    for (double& v : g.data()) v = normal(rng);
    rot = orthonormalize_columns(g);
  }

  const double root_n = std::sqrt(static_cast<double>(n));
  // X = sqrt(n) U diag(sigma) Vᵀ
  DenseMatrix us(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) us(i, j) = root_n * basis(i, j + 1) * std::sqrt(spec.spectrum[j]);
  DenseMatrix x = matmul(us, rot.transpose());

  Vector y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) y[i] += root_n * spec.correlations[j] * basis(i, j + 1);

  const double residual = 1.0 - total;
  if (residual > 0.0) {
    Vector noise(n);
    for (double& v : noise) v = normal(rng);
    const DenseMatrix bt = basis.transpose();
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k <= d; ++k) simd::axpy(-simd::dot(bt.row(k), noise), bt.row(k), noise);
    }
    simd::scale(std::sqrt(residual * static_cast<double>(n)) / norm2(noise), noise);
    simd::axpy(1.0, noise, y);
  }

  PreprocessRecord rec = fit_standardization(x, y);
  return apply_standardization(rec, std::move(x), std::move(y), SplitTag::All);
}

void write_binary(std::ostream& out, const Dataset& data) {
  out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  put_u64(out, data.n());
  put_u64(out, data.d());
  for (double v : data.x.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  for (double v : data.y) put_u64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw Error(ErrorKind::IoError, "failed writing binary dataset");
}

Dataset read_binary(std::istream& in) {
  char magic[5];
  if (!in.read(magic, 5) || std::string_view(magic, 5) != kMagic) {
    throw Error(ErrorKind::IoError, "not a HOPT1 dataset");
  }
  const std::uint64_t n = get_u64(in);
  const std::uint64_t d = get_u64(in);
  if (d != 0 && n > (std::uint64_t{1} << 40) / d) {
    throw Error(ErrorKind::IoError, "implausible binary dataset dimensions");
  }
  std::vector<double> xs(n * d);
  for (double& v : xs) v = std::bit_cast<double>(get_u64(in));
  Vector y(n);
  for (double& v : y) v = std::bit_cast<double>(get_u64(in));
  Dataset out;
  out.x = DenseMatrix(n, d, std::move(xs));
  out.y = std::move(y);
  out.preprocessing.feature_means.assign(d, 0.0);
  out.preprocessing.feature_scales.assign(d, 1.0);
  return out;
}

void write_binary_file(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  write_binary(out, data);
}

Dataset read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return read_binary(in);
}

}  // namespace hopt
