#include <doctest.h>

#include <vector>

#include "helpers.hpp"
#include "sectorial/eigenstate.hpp"

using namespace sectorial;
using testing::diag;
using testing::mat2;

namespace {

Complex lowest(const ComplexMatrix& h) { return eig_oracle(h).eigenvalues[0]; }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) s[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
  return s;
}

}  // namespace

TEST_SUITE("eigenstate") {

TEST_CASE("rank_one_decompose") {
  const RankOnePair p = rank_one_decompose(mat2(1, 1, 0, 0));
  CHECK((p.phi - ComplexVector::Unit(2, 0)).norm() < 1e-15);
  CHECK(std::abs(p.eta[0] - 1.0) < 1e-15);
  CHECK(std::abs(p.eta[1] - 1.0) < 1e-15);
  CHECK(p.pinned == 0);

  try {
    rank_one_decompose(ComplexMatrix::Identity(2, 2));
    FAIL("expected RankNotOne");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankNotOne);
  }

  std::mt19937_64 rng(1);
  ComplexVector v = random_vector(4, rng), w = random_vector(4, rng);
  w /= std::conj(w.dot(v));
  const ComplexMatrix proj = v * w.adjoint();
  const RankOnePair q = rank_one_decompose(proj, Index(2));
  CHECK(q.pinned == 2);
  CHECK(!q.repinned);
  CHECK(std::abs(q.phi[2].imag()) == 0.0);
  CHECK(q.phi[2].real() > 0.0);
  CHECK(std::abs(q.phi.norm() - 1.0) < 1e-14);
  CHECK(std::abs(q.eta.dot(q.phi) - 1.0) < 1e-13);
  CHECK((q.phi * q.eta.adjoint() - proj).norm() < 1e-12 * proj.norm());

  // tiny pinned component: the largest one takes over
  v[1] = 1e-3;
  w /= std::conj(w.dot(v));
  const RankOnePair r = rank_one_decompose(v * w.adjoint(), Index(1));
  CHECK(r.repinned);
  CHECK(r.pinned != 1);
}

TEST_CASE("track_eigenvalue along a linear family") {
  const FormFamily fam = [](double s) {
    return FormMatrix(diag({0.0, 1.0}) + s * diag({0.1, 0.0}));
  };
  const auto path = linspace(0.0, 1.0, 11);
  const TrackResult tr = track_eigenvalue(fam, path, Circle{0.0, 0.3, 64});
  REQUIRE(tr.points.size() == 11);
  for (const TrackPoint& p : tr.points) {
    CHECK(std::abs(p.e - 0.1 * p.s) < 1e-12);
    CHECK(p.gap == doctest::Approx(1.0 - 0.1 * p.s));
  }
  CHECK(std::abs(tr.discrepancy - 0.1) < 1e-12);
}

TEST_CASE("track_eigenvalue on a non-normal family") {
  std::mt19937_64 rng(2);
  ComplexVector lam(5);
  lam << 0.0, 2.0, Complex(2.5, 1.0), 4.0, Complex(3.0, -1.0);
  const ComplexMatrix a = testing::with_spectrum(lam, rng);
  const ComplexMatrix b = 0.2 * random_matrix(5, rng);
  const FormFamily fam = [&](double s) { return FormMatrix(a + s * b); };
  const auto path = linspace(0.0, 1.0, 6);
  const TrackResult tr = track_eigenvalue(fam, path, Circle{0.0, 0.5, 64});
  for (const TrackPoint& p : tr.points) {
    const SpectralData sd = eig_oracle(a + p.s * b);
    CHECK((sd.eigenvalues.array() - p.e).abs().minCoeff() < 1e-9);
  }
}

TEST_CASE("track_eigenvalue reports monodromy") {
  // eigenvalues +- e^{i pi s}: one loop in s swaps them
  const FormFamily fam = [](double s) {
    return FormMatrix(mat2(0, 1, std::polar(1.0, 2.0 * kPi * s), 0));
  };
  const auto path = linspace(0.0, 1.0, 51);
  const TrackResult tr = track_eigenvalue(fam, path, Circle{1.0, 0.5, 64});
  CHECK(std::abs(tr.points.back().e + 1.0) < 1e-10);
  CHECK(std::abs(tr.discrepancy + 2.0) < 1e-10);
}

TEST_CASE("track_eigenvalue stops at a crossing") {
  const FormFamily fam = [](double s) { return FormMatrix(diag({s, 1.0})); };
  const std::vector<double> path{0.0, 1.0};
  try {
    track_eigenvalue(fam, path, Circle{0.0, 0.3, 64});
    FAIL("expected IsolationLost");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IsolationLost);
  }
  CHECK_THROWS_AS(isolating_circle(diag({1.0, 1.0, 3.0})), Error);
}

TEST_CASE("hellmann_feynman on matrices") {
  const Circle c{0.0, 0.3, 64};
  const HellmannFeynman hf =
      hellmann_feynman(FormMatrix(diag({0.0, 1.0})), FormMatrix(diag({0.1, 0.0})), c);
  CHECK(std::abs(hf.derivative - 0.1) < 1e-13);
  CHECK(std::abs(hf.e) < 1e-13);

  std::mt19937_64 rng(3);
  ComplexVector lam(6);
  lam << Complex(0.5, 0.2), 2.0, 3.0, Complex(3.0, 1.0), 4.0, 5.0;
  const ComplexMatrix a = testing::with_spectrum(lam, rng, 0.5);
  const ComplexMatrix da = random_matrix(6, rng);
  const HellmannFeynman g =
      hellmann_feynman(FormMatrix(a), FormMatrix(da), Circle{Complex(0.5, 0.2), 0.5, 128});
  const double h = 1e-6;
  const Complex fd = (lowest(a + h * da) - lowest(a - h * da)) / (2 * h);
  CHECK(std::abs(g.derivative - fd) < 1e-7 * std::abs(fd));
  CHECK(g.adjoint_residual < 1e-10);
  CHECK(std::abs(g.pair.eta.dot(g.pair.phi) - 1.0) < 1e-12);
}

TEST_CASE("hermitian forms give eta = phi") {
  std::mt19937_64 rng(4);
  const ComplexMatrix h = random_hermitian(6, rng);
  const Circle c = isolating_circle(h);
  const HellmannFeynman hf = hellmann_feynman(FormMatrix(h), FormMatrix(random_hermitian(6, rng)), c);
  CHECK((hf.pair.eta - hf.pair.phi).norm() < 1e-10);
  CHECK(std::abs(hf.derivative.imag()) < 1e-12);
}

TEST_CASE("projection derivative is off-diagonal") {
  std::mt19937_64 rng(5);
  ComplexVector lam(5);
  lam << 0.0, 1.5, 2.0, Complex(2.0, 1.0), 3.0;
  const ComplexMatrix a = testing::with_spectrum(lam, rng);
  const ComplexMatrix b = random_matrix(5, rng);
  const Contour c = Circle{0.0, 0.5, 128};
  const double h = 1e-5;
  const ComplexMatrix p = riesz_projection(a, c);
  const ComplexMatrix dp = (riesz_projection(a + h * b, c) - riesz_projection(a - h * b, c)) / Complex(2 * h);
  CHECK((p * dp * p).norm() < 1e-8 * dp.norm());
  // <eta, dphi> + <deta, phi> = 0 for the normalised pair
  const RankOnePair p0 = rank_one_decompose(p, Index(0));
  const RankOnePair pp = rank_one_decompose(riesz_projection(a + h * b, c), Index(0));
  const RankOnePair pm = rank_one_decompose(riesz_projection(a - h * b, c), Index(0));
  const ComplexVector dphi = (pp.phi - pm.phi) / (2 * h), deta = (pp.eta - pm.eta) / (2 * h);
  CHECK(std::abs(p0.eta.dot(dphi) + deta.dot(p0.phi)) < 1e-8);
}

TEST_CASE("Schroedinger: derivative, density and current") {
  std::mt19937_64 rng(6);
  const Grid g(1, 5, 0.6);
  const ManyBodySpace s(g, 2);
  FieldConfig x = FieldConfig::zeros(g);
  x.u0 = Eigen::VectorXd::LinSpaced(5, 0.0, 2.0);
  x.u = 0.1 * random_vector(5, rng);
  x.a = 0.1 * random_vector(5, rng);
  x.v0 = radial_kernel(g, [](double r) { return 1.0 / (1.0 + r); }).real();

  FieldConfig w = FieldConfig::zeros(g);
  w.u = random_vector(5, rng);
  w.a = random_vector(5, rng);
  w.v = random_vector(5, rng);
  w.f = random_vector(5, rng);
  const HellmannFeynman hf = hellmann_feynman(s, x, w);
  const double h = 1e-6;
  const Complex fd = (lowest(family(s, x.displaced(w, h)).matrix()) -
                      lowest(family(s, x.displaced(w, -h)).matrix())) / (2 * h);
  CHECK(std::abs(hf.derivative - fd) < 1e-6 * std::max(1.0, std::abs(fd)));

  const ChargeCurrent cc = eigenstate_density(s, x);
  CHECK(std::abs(cc.rho.sum() * g.cell_volume() - 2.0) < 1e-8);
  const double vol = g.cell_volume();
  for (Index j = 0; j < 5; ++j) {
    FieldConfig dj = FieldConfig::zeros(g);
    dj.u[j] = 1.0;
    const Complex dej = (lowest(family(s, x.displaced(dj, h)).matrix()) -
                         lowest(family(s, x.displaced(dj, -h)).matrix())) / (2 * h);
    CHECK(std::abs(cc.rho[j] - dej / vol) < 1e-6);
    FieldConfig dl = FieldConfig::zeros(g);
    dl.a[j] = 1.0;
    const Complex dlj = (lowest(family(s, x.displaced(dl, h)).matrix()) -
                         lowest(family(s, x.displaced(dl, -h)).matrix())) / (2 * h);
    CHECK(std::abs(cc.j[j] - dlj / vol) < 1e-6);
  }

  // A = 0 with real fields: real ground state, no current
  FieldConfig real = FieldConfig::zeros(g);
  real.u0 = x.u0;
  real.v0 = x.v0;
  const ChargeCurrent c0 = eigenstate_density(s, real);
  CHECK(c0.j.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(c0.rho.imag().cwiseAbs().maxCoeff() < 1e-10);
}

}  // TEST_SUITE
