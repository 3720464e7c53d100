#include <doctest.h>

#include "helpers.hpp"
#include "sectorial/contour.hpp"

using namespace sectorial;
using testing::diag;
using testing::mat2;

namespace {

// Spectral projector onto the eigenvalues selected by `keep`, from right and
// left eigenvectors: sum v_k w_k* / (w_k* v_k).
template <class Keep>
ComplexMatrix oracle_projector(const ComplexMatrix& a, Keep keep) {
  Eigen::ComplexEigenSolver<ComplexMatrix> right(a), left(a.adjoint());
  ComplexMatrix p = ComplexMatrix::Zero(a.rows(), a.cols());
  for (Index k = 0; k < a.rows(); ++k) {
    const Complex lam = right.eigenvalues()[k];
    if (!keep(lam)) continue;
    Index j = 0;
    (left.eigenvalues().array() - std::conj(lam)).abs().minCoeff(&j);
    const ComplexVector v = right.eigenvectors().col(k), w = left.eigenvectors().col(j);
    p += v * w.adjoint() / w.dot(v);
  }
  return p;
}

}  // namespace

TEST_SUITE("contour") {

TEST_CASE("gauss_legendre integrates polynomials") {
  const GaussRule g = gauss_legendre(16);
  double s = 0.0, s30 = 0.0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    s += g.weights[k];
    s30 += g.weights[k] * std::pow(g.nodes[k], 30);
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s30 == doctest::Approx(2.0 / 31.0).epsilon(1e-13));
}

TEST_CASE("quadrature self-tests") {
  std::vector<std::pair<Contour, Complex>> cases = {
      {Circle{Complex(1.0, 1.0), 2.0, 64}, Complex(1.5, 0.5)},
      {Polyline{{Complex(-1, -1), Complex(2, -1), Complex(2, 2), Complex(-1, 2)}, 16, 0.5},
       Complex(0.3, 0.2)},
  };
  for (const auto& [c, z0] : cases) {
    const QuadratureRule r = quadrature(c);
    const SelfTest st = self_test(r, z0);
    CHECK(st.closure <= 1e-10);
    CHECK(st.winding <= 1e-8);
    CHECK(winding_number(r, z0) == 1);
    CHECK(winding_number(r, Complex(10.0, 10.0)) == 0);
  }
}

TEST_CASE("riesz_projection examples") {
  const ComplexMatrix p = riesz_projection(diag({0.0, 5.0}), Circle{0.0, 1.0, 64});
  CHECK((p - diag({1.0, 0.0})).norm() < 1e-12);

  const ComplexMatrix jb = mat2(1.0, 1.0, 0.0, 1.0);
  CHECK((riesz_projection(jb, Circle{1.0, 1.0, 64}) - ComplexMatrix::Identity(2, 2)).norm() <
        1e-12);

  const ComplexMatrix a = mat2(0.0, 1.0, 0.0, 2.0);
  const ComplexMatrix q = riesz_projection(a, Circle{0.0, 1.0, 64});
  CHECK((q - mat2(1.0, -0.5, 0.0, 0.0)).norm() < 1e-12);
  const ComplexMatrix oracle = oracle_projector(a, [](Complex z) { return std::abs(z) < 1.0; });
  CHECK((q - oracle).norm() < 1e-12);
  CHECK((q * a - a * q).norm() < 1e-8 * norm1(a));
}

TEST_CASE("projected_operator examples") {
  CHECK(projected_operator(diag({0.0, 5.0}), Circle{0.0, 1.0, 64}).norm() < 1e-12);
  CHECK((projected_operator(diag({3.0, 7.0}), Circle{3.0, 1.0, 64}) - diag({3.0, 0.0})).norm() <
        1e-12);
  const ComplexMatrix a = mat2(0.0, 1.0, 0.0, 2.0);
  const ComplexMatrix ag = projected_operator(a, Circle{2.0, 0.5, 128});
  const ComplexMatrix p = riesz_projection(a, Circle{2.0, 0.5, 128});
  CHECK((ag - a * p).norm() < 1e-8);
  CHECK((ag - p * a * p).norm() < 1e-8);
  CHECK(std::abs(trace(ag) - 2.0) < 1e-10);
}

TEST_CASE("rdt_function") {
  std::mt19937_64 rng(3);
  ComplexVector lam(6);
  lam << 1.0, 1.5, Complex(2.0, 0.5), 2.5, 3.0, Complex(1.2, -0.4);
  const ComplexMatrix a = testing::with_spectrum(lam, rng);
  const Circle c{2.0, 2.5, 256};
  const ScalarFunction e = [](Complex z) { return std::exp(-z); };
  CHECK(testing::rel_err(rdt_function(a, c, e), expm_oracle(-a)) < 1e-7);
  const ScalarFunction one = [](Complex) { return Complex(1.0); };
  CHECK((rdt_function(a, c, one) - riesz_projection(a, c)).norm() < 1e-12);

  // algebra morphism and annihilation of ker P on a partial enclosure
  const Circle part{1.2, 0.6, 256};
  const ScalarFunction f = [](Complex z) { return z * z; };
  const ScalarFunction g = [](Complex z) { return std::exp(z); };
  const ScalarFunction fg = [](Complex z) { return z * z * std::exp(z); };
  const ComplexMatrix pf = rdt_function(a, part, f), pg = rdt_function(a, part, g);
  const ComplexMatrix p = riesz_projection(a, part);
  CHECK((rdt_function(a, part, fg) - pf * pg).norm() <= 1e-7 * std::max(1.0, pf.norm() * pg.norm()));
  const ComplexMatrix kernel = ComplexMatrix::Identity(6, 6) - p;
  CHECK((pg * kernel).norm() <= 1e-7 * std::exp(1.8));
}

TEST_CASE("extract_eigenvalue") {
  CHECK(std::abs(extract_eigenvalue(diag({3.0, 7.0}), Circle{3.0, 1.0, 64}) - 3.0) < 1e-12);
  CHECK(std::abs(extract_eigenvalue(mat2(2.0, 5.0, 0.0, 9.0), Circle{2.0, 2.0, 64}) - 2.0) <
        1e-12);
  try {
    extract_eigenvalue(diag({3.0, 7.0}), Circle{20.0, 1.0, 64});
    FAIL("expected EmptyEnclosure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyEnclosure);
  }
  try {
    extract_eigenvalue(diag({3.0, 3.1, 9.0}), Circle{3.0, 1.0, 256});
    FAIL("expected DegenerateEnclosure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateEnclosure);
  }
}

TEST_CASE("contour through the spectrum is rejected") {
  try {
    riesz_projection(diag({1.0, 5.0}), Circle{0.0, 1.0, 64});
    FAIL("expected ContourThroughSpectrum");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ContourThroughSpectrum);
  }
}

TEST_CASE("rank_of_projection") {
  CHECK(rank_of_projection(ComplexMatrix::Zero(3, 3)) == 0);
  CHECK(rank_of_projection(ComplexMatrix::Identity(5, 5)) == 5);
  CHECK(rank_of_projection(mat2(1.0, -0.5, 0.0, 0.0)) == 1);
  try {
    rank_of_projection(mat2(1.0, 1.0, 1.0, 0.0));
    FAIL("expected NotAProjection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAProjection);
  }
}

TEST_CASE("trapezoid convergence is geometric in the node count") {
  const ComplexMatrix a = mat2(2.0, 5.0, 0.0, 9.0);
  std::vector<double> err;
  Options opt;
  opt.node_spacing_factor = 1.0;  // allow the coarse rules
  for (int m : {16, 32, 64}) {
    err.push_back(std::abs(extract_eigenvalue(a, Circle{2.5, 2.0, m}, opt) - 2.0));
  }
  CHECK(err[1] < err[0] * 1e-2);
  CHECK(err[2] < std::max(err[1] * 1e-2, 1e-13));
}

TEST_CASE("projections from disjoint contours add up") {
  std::mt19937_64 rng(5);
  ComplexVector lam(5);
  lam << 0.0, 0.3, 4.0, 4.2, 9.0;
  const ComplexMatrix a = testing::with_spectrum(lam, rng);
  const ComplexMatrix p1 = riesz_projection(a, Circle{0.15, 1.0, 256});
  const ComplexMatrix p2 = riesz_projection(a, Circle{4.1, 1.0, 256});
  const ComplexMatrix p12 = riesz_projection(a, Circle{2.1, 4.0, 512});
  CHECK((p1 + p2 - p12).norm() < 1e-8);
}

TEST_CASE("low_energy_hamiltonian") {
  const RightBoundary rb{5.0, Sector(0.0, 0.1), 16, 0.0};
  const LowEnergyPart low = low_energy_hamiltonian(diag({1.0, 2.0, 10.0}), rb);
  CHECK(rank_of_projection(low.projection) == 2);
  CHECK((low.hamiltonian - diag({1.0, 2.0, 0.0})).norm() < 1e-8);

  const RightBoundary left{-3.0, Sector(0.0, 0.1), 16, 0.0};
  CHECK(rank_of_projection(low_energy_hamiltonian(diag({1.0, 2.0}), left).projection) == 0);

  try {
    low_energy_hamiltonian(diag({1.0, 5.0}), rb);
    FAIL("expected GammaHitsSpectrum");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GammaHitsSpectrum);
  }

  std::mt19937_64 rng(7);
  const ComplexMatrix t = testing::random_sectorial(32, rng, 0.3);
  const SpectralData sd = eig_oracle(t);
  // gamma in the widest gap among the real parts near the median
  std::vector<double> re(32);
  for (int k = 0; k < 32; ++k) re[k] = sd.eigenvalues[k].real();
  std::sort(re.begin(), re.end());
  int best = 12;
  for (int k = 12; k < 20; ++k) if (re[k + 1] - re[k] > re[best + 1] - re[best]) best = k;
  const double gamma = 0.5 * (re[best] + re[best + 1]);
  const Sector s = fit_sector(numerical_range(FormMatrix(t), 256), 1e-2);
  const LowEnergyPart part = low_energy_hamiltonian(t, RightBoundary{gamma, s, 16, 0.0});
  const ComplexMatrix oracle = oracle_projector(t, [&](Complex z) { return z.real() < gamma; });
  CHECK((part.projection - oracle).norm() < 1e-7);
  CHECK(rank_of_projection(part.projection) == best + 1);
}

}  // TEST_SUITE
