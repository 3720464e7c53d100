#include <doctest.h>

#include "helpers.hpp"
#include "sectorial/semigroup.hpp"

using namespace sectorial;
using testing::diag;

namespace {

Sector fitted(const ComplexMatrix& t) {
  return fit_sector(numerical_range(FormMatrix(t), 256), 1e-2);
}

}  // namespace

TEST_SUITE("semigroup") {

TEST_CASE("emap examples") {
  const FormMatrix id = FormMatrix::identity(3);
  CHECK(testing::rel_err(emap(1.0, id, fitted(id.matrix())),
                         std::exp(-1.0) * ComplexMatrix::Identity(3, 3)) < 1e-10);
  const ComplexMatrix d = diag({1.0, 2.0});
  CHECK(testing::rel_err(emap(2.0, FormMatrix(d), fitted(d)),
                         diag({std::exp(-2.0), std::exp(-4.0)})) < 1e-10);
  std::mt19937_64 rng(1);
  const ComplexMatrix t = testing::random_sectorial(16, rng);
  const Complex beta(0.7, 0.3);
  CHECK(testing::rel_err(emap(beta, FormMatrix(t), fitted(t)), expm_oracle(-beta * t)) < 1e-6);
  CHECK((emap(0.0, FormMatrix(t), fitted(t)) - ComplexMatrix::Identity(16, 16)).norm() == 0.0);
}

TEST_CASE("emap errors") {
  const ComplexMatrix d = diag({1.0, 2.0});
  try {
    emap(Complex(0.1, 1.0), FormMatrix(d), Sector(0.0, 0.5));
    FAIL("expected NotSectorialForBeta");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSectorialForBeta);
  }
  try {
    emap(1.0, FormMatrix(d), Sector(1.5, 0.2));
    FAIL("expected SectorViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SectorViolation);
  }
}

TEST_CASE("emap: semigroup law and real symmetry") {
  std::mt19937_64 rng(2);
  // real entries: symmetric positive part plus a small antisymmetric part
  const Eigen::MatrixXd g = Eigen::MatrixXd::Random(10, 10);
  const Eigen::MatrixXd sym = g * g.transpose() / 10.0 + Eigen::MatrixXd::Identity(10, 10);
  const Eigen::MatrixXd anti = 0.3 * (g - g.transpose());
  const ComplexMatrix t = (sym + anti).cast<Complex>();
  const Sector s = fitted(t);
  const Complex b1(0.4, 0.2), b2(0.3, -0.1);
  const auto e = emap_many({b1, b2, b1 + b2, std::conj(b1)}, FormMatrix(t), s);
  CHECK(testing::rel_err(e[0] * e[1], e[2]) < 1e-8);
  CHECK(testing::rel_err(e[3], e[0].conjugate()) < 1e-10);
}

TEST_CASE("thermal_state examples") {
  const double eps = 0.7;
  const ComplexMatrix one = diag({eps});
  const Complex beta(1.3, 0.2);
  const ThermalState s1 = thermal_state(beta, FormMatrix(one), Sector(0.0, 0.5));
  CHECK(std::abs(s1.z - std::exp(-beta * eps)) < 1e-12);
  CHECK(std::abs(s1.f - eps) < 1e-12);

  const double gap = 1.7;
  const ComplexMatrix two = diag({0.0, gap});
  for (double b : {0.3, 1.0, 4.0}) {
    const ThermalState s = thermal_state(b, FormMatrix(two), fitted(two));
    CHECK(std::abs(s.f - (-std::log1p(std::exp(-b * gap)) / b)) < 1e-12);
    CHECK(std::abs(trace(s.rho) - 1.0) < 1e-12);
    CHECK(std::abs(thermal_expectation(s, ComplexMatrix::Identity(2, 2)) - 1.0) < 1e-12);
    const double closed = gap * std::exp(-b * gap) / (1.0 + std::exp(-b * gap));
    CHECK(std::abs(thermal_expectation(s, two) - closed) < 1e-12);
  }
}

TEST_CASE("thermal_state: hermitian free energy and expectation oracle") {
  std::mt19937_64 rng(3);
  const ComplexMatrix h = random_hermitian(24, rng);
  const Sector s = fitted(h);
  const double beta = 0.8;
  const ThermalState st = thermal_state(beta, FormMatrix(h), s);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const Eigen::VectorXd w = (-beta * es.eigenvalues().array()).exp();
  CHECK(std::abs(st.f - (-std::log(w.sum()) / beta)) < 1e-9);
  const ComplexMatrix b = random_matrix(24, rng);
  const ComplexMatrix bb = es.eigenvectors().adjoint() * b * es.eigenvectors();
  Complex oracle = 0.0;
  for (int k = 0; k < 24; ++k) oracle += w[k] * bb(k, k);
  oracle /= w.sum();
  CHECK(std::abs(thermal_expectation(st, b) - oracle) < 1e-9 * std::max(1.0, std::abs(oracle)));
}

TEST_CASE("zero partition function") {
  // eigenvalues 0 and i pi at beta = 1: Z = 1 + e^{-i pi} = 0
  const ComplexMatrix u = diag({0.0, Complex(0.0, kPi)});
  Options opt;
  opt.z_floor = 1e-8;
  try {
    thermal_state(1.0, FormMatrix(u), Sector(-1.0, 1.3), opt);
    FAIL("expected ZeroPartitionFunction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroPartitionFunction);
  }
}

TEST_CASE("free_energy_path is continuous") {
  std::vector<Complex> betas, zs;
  for (int k = 0; k <= 40; ++k) {
    const Complex b = std::polar(1.0, -1.2 + 2.4 * k / 40.0);
    betas.push_back(b);
    zs.push_back(std::exp(-b * Complex(0.0, 6.0)));  // winds through the cut
  }
  const auto f = free_energy_path(betas, zs);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(std::abs(f[k] - Complex(0.0, 6.0)) < 1e-12);
}

TEST_CASE("Schatten-Hoelder on thermal exponentials") {
  std::mt19937_64 rng(4);
  const ComplexMatrix q = testing::random_unitary(12, rng);
  Eigen::VectorXd d(12);
  for (int k = 0; k < 12; ++k) d[k] = 0.5 + 0.3 * k;
  const ComplexMatrix h = q * d.cast<Complex>().asDiagonal() * q.adjoint();
  const Sector s = fitted(h);
  for (double p : {2.0, 4.0}) {
    const double lhs = schatten_norm(emap(1.5, FormMatrix(h), s), 1.0);
    const double rhs = std::pow(schatten_norm(emap(1.5 / p, FormMatrix(h), s), p), p);
    CHECK(lhs <= rhs * (1.0 + 1e-9));
  }
}

TEST_CASE("duhamel_first_order") {
  const ComplexMatrix h = diag({0.5, 1.0, 2.0});
  const ComplexMatrix t = diag({1.0, -2.0, 0.5});
  const Complex beta(0.9, 0.2);
  const ComplexMatrix d = duhamel_first_order(beta, FormMatrix(h), FormMatrix(t));
  CHECK(testing::rel_err(d, -beta * t * expm_oracle(-beta * h)) < 1e-9);
  CHECK(duhamel_first_order(beta, FormMatrix(h), FormMatrix::zero(3)).norm() < 1e-14);

  std::mt19937_64 rng(5);
  const ComplexMatrix hh = random_hermitian(8, rng), tt = random_hermitian(8, rng);
  const double eps = 1e-5;
  const ComplexMatrix fd =
      (expm_oracle(-(hh + eps * tt)) - expm_oracle(-(hh - eps * tt))) / (2.0 * eps);
  CHECK(testing::rel_err(duhamel_first_order(1.0, FormMatrix(hh), FormMatrix(tt)), fd) < 1e-5);
}

TEST_CASE("of_norm") {
  std::mt19937_64 rng(6);
  const ComplexMatrix q = testing::random_unitary(6, rng);
  Eigen::VectorXd d(6);
  for (int k = 0; k < 6; ++k) d[k] = 1.0 + k;
  const FormMatrix h0(q * d.cast<Complex>().asDiagonal() * q.adjoint());
  CHECK(of_norm(h0, h0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(of_norm(kI * h0, h0) == doctest::Approx(1.0).epsilon(1e-12));
  try {
    of_norm(h0, FormMatrix(0.5 * ComplexMatrix::Identity(6, 6)));
    FAIL("expected H0NotCoercive");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::H0NotCoercive);
  }
  // every t in the unit of_norm ball around h0 has Num t in Sec(0, pi/4)
  for (int trial = 0; trial < 20; ++trial) {
    FormMatrix e(random_matrix(6, rng));
    e *= Complex(0.95 / of_norm(e, h0));
    const FormMatrix t = h0 + e;
    CHECK(of_norm(t - h0, h0) < 1.0);
    const auto range = numerical_range(t, 128);
    for (const Complex& p : range.points) CHECK(Sector(0.0, kPi / 4).contains(p, 1e-9));
    CHECK(range_in_sector(t, Sector(0.0, kPi / 4), 1e-9));
  }
}

}  // TEST_SUITE
