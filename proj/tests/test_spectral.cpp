#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hopt/data_io.hpp"
#include "hopt/error.hpp"
#include "hopt/spectral.hpp"
#include "oracles.hpp"

using namespace hopt;

namespace {

Dataset make_synthetic(double tau, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n = 300;
  spec.d = 8;
  spec.spectrum = geometric_spectrum(8, 1.0, 1e-3);
  spec.correlations = bounded_correlations(spec.spectrum, tau, 0.5);
  spec.noise_seed = seed;
  return generate_synthetic(spec);
}

}  // namespace

TEST_CASE("measured tau recovers the generator's tau") {
  for (double tau : {0.05, 0.25, 0.6}) {
    const Dataset d = make_synthetic(tau, 11);
    const TauProfile p = measure_tau(decompose(d, 1e-6));
    CHECK(p.tau == doctest::Approx(tau).epsilon(0.1));
    CHECK(p.argmax == 0);
  }
}

TEST_CASE("eigenfeature variances match an independent eigensolve of XᵀX/n") {
  const Dataset d = oracle::random_problem(120, 6, 4);
  const SpectralDecomposition s = decompose(d, 1e-3);
  oracle::Mat c = oracle::mul(oracle::transpose(oracle::to_mat(d.x)), oracle::to_mat(d.x));
  for (auto& row : c)
    for (double& v : row) v /= 120.0;
  const auto [w, v] = oracle::jacobi(c);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(s.z_variances[j] == doctest::Approx(w[j]).epsilon(1e-10));
    CHECK(s.regularized_variances[j] == doctest::Approx(w[j] + 1e-3).epsilon(1e-10));
  }
  // Eigenfeatures are uncorrelated with the advertised variances.
  const DenseMatrix z = eigenfeatures(s, d.x);
  const DenseMatrix zz = gram(z, 1.0 / 120.0);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(zz(i, j) == doctest::Approx(i == j ? s.z_variances[i] : 0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("rank-deficient data pads variances with zeros and skips them in tau") {
  Dataset d = oracle::random_problem(40, 4, 9);
  for (std::size_t i = 0; i < 40; ++i) d.x(i, 3) = d.x(i, 1);
  const SpectralDecomposition s = decompose(d, 1e-6);
  CHECK(s.rank() == 3);
  CHECK(s.z_variances.size() == 4);
  CHECK(s.z_variances[3] == 0.0);
  const TauProfile p = measure_tau(s);
  CHECK_FALSE(p.per_feature[3].counted);
  CHECK(count_above(p, 0.0) == 3);
}

TEST_CASE("all-zero design is rejected") {
  Dataset d{DenseMatrix(10, 3), Vector(10, 1.0), {}, SplitTag::All};
  try {
    measure_tau(decompose(d, 1e-6));
    FAIL("expected AllZeroVariance");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AllZeroVariance);
  }
}

TEST_CASE("count_above is monotone in zeta") {
  const SpectralDecomposition s = decompose(make_synthetic(0.2, 2), 1e-6);
  std::size_t prev = s.z_variances.size();
  for (double z = 1e-5; z < 2.0; z *= 1.7) {
    const std::size_t r = count_above(s, z);
    CHECK(r <= prev);
    prev = r;
  }
  CHECK(count_above(s, 10.0) == 0);
}

TEST_CASE("scatter export lists counted features with log coordinates") {
  const TauProfile p = measure_tau(decompose(make_synthetic(0.2, 5), 1e-6));
  const ScatterTable t = export_scatter(p);
  CHECK(t.points.size() + t.omitted == p.per_feature.size());
  std::ostringstream out;
  write_scatter_csv(out, t);
  CHECK(out.str().rfind("j,log10_h,log10_v,sigma2,rho2,ratio\n", 0) == 0);
}
