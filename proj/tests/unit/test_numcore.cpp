#include <doctest.h>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "sectorial/numcore.hpp"

using namespace sectorial;
using testing::diag;
using testing::mat2;

TEST_SUITE("numcore") {

TEST_CASE("solve: identity and diagonal") {
  const ComplexMatrix i4 = ComplexMatrix::Identity(4, 4);
  CHECK((solve(i4, i4) - i4).norm() == doctest::Approx(0.0));
  const ComplexMatrix x = solve(diag({2.0, 4.0}), ComplexMatrix::Identity(2, 2));
  CHECK((x - diag({0.5, 0.25})).norm() < 1e-15);
}

TEST_CASE("solve: residual on a well-conditioned system") {
  std::mt19937_64 rng(3);
  const ComplexMatrix a = random_matrix(8, rng) + 8.0 * ComplexMatrix::Identity(8, 8);
  const ComplexMatrix b = random_vector(8, rng);
  const ComplexMatrix x = solve(a, b);
  CHECK((a * x - b).norm() / b.norm() <= 1e-12);
}

TEST_CASE("solve: singular matrix") {
  const ComplexMatrix a = mat2(1.0, 2.0, 2.0, 4.0);
  try {
    solve(a, ComplexMatrix::Identity(2, 2));
    FAIL("expected SingularMatrix");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularMatrix);
  }
}

TEST_CASE("eig_oracle examples") {
  const SpectralData d = eig_oracle(diag({Complex(2.0, 3.0), 1.0}));
  CHECK(std::abs(d.eigenvalues[0] - 1.0) < 1e-14);
  CHECK(std::abs(d.eigenvalues[1] - Complex(2.0, 3.0)) < 1e-14);

  const SpectralData nil = eig_oracle(mat2(0.0, 1.0, 0.0, 0.0));
  CHECK(std::abs(nil.eigenvalues[0]) < 1e-14);
  CHECK(std::abs(nil.eigenvalues[1]) < 1e-14);

  // companion matrix of z^2 - 3z + 2
  const SpectralData c = eig_oracle(mat2(0.0, -2.0, 1.0, 3.0));
  CHECK(std::abs(c.eigenvalues[0] - 1.0) < 1e-12);
  CHECK(std::abs(c.eigenvalues[1] - 2.0) < 1e-12);
}

TEST_CASE("eig_oracle residual and order") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = random_matrix(12, rng);
    const SpectralData d = eig_oracle(a);
    for (Index k = 0; k < 12; ++k) {
      const ComplexVector r = a * d.eigenvectors.col(k) - d.eigenvalues[k] * d.eigenvectors.col(k);
      CHECK(r.norm() <= 1e-10 * norm1(a));
      if (k > 0) {
        const Complex p = d.eigenvalues[k - 1], q = d.eigenvalues[k];
        CHECK((p.real() < q.real() || (p.real() == q.real() && p.imag() <= q.imag())));
      }
    }
  }
}

TEST_CASE("expm_oracle examples") {
  CHECK((expm_oracle(ComplexMatrix::Zero(3, 3)) - ComplexMatrix::Identity(3, 3)).norm() < 1e-15);
  CHECK(std::abs(expm_oracle(diag({-1.0}))(0, 0) - std::exp(-1.0)) < 1e-15);
  const ComplexMatrix n = mat2(0.0, 1.0, 0.0, 0.0);
  CHECK((expm_oracle(n) - (ComplexMatrix::Identity(2, 2) + n)).norm() < 1e-15);
  try {
    expm_oracle(diag({1e4}));
    FAIL("expected Overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Overflow);
  }
}

TEST_CASE("expm_oracle: commuting sum") {
  std::mt19937_64 rng(9);
  const ComplexMatrix q = testing::random_unitary(6, rng);
  const ComplexMatrix a = q * diag({0.1, -0.3, 0.5, 0.2, Complex(0, 1), -1.0}) * q.adjoint();
  const ComplexMatrix b = q * diag({1.0, 0.4, -0.2, Complex(0.3, 0.3), 0.0, 0.7}) * q.adjoint();
  CHECK(testing::rel_err(expm_oracle(a + b), expm_oracle(a) * expm_oracle(b)) < 1e-9);
}

TEST_CASE("schatten_norm") {
  CHECK(schatten_norm(ComplexMatrix::Identity(5, 5), 1.0) == doctest::Approx(5.0));
  std::mt19937_64 rng(2);
  const ComplexVector u = random_vector(4, rng), v = random_vector(4, rng);
  const ComplexMatrix r1 = u * v.adjoint();
  for (double p : {1.0, 2.0, 3.5, std::numeric_limits<double>::infinity()}) {
    CHECK(schatten_norm(r1, p) == doctest::Approx(u.norm() * v.norm()).epsilon(1e-12));
  }
  const ComplexMatrix a = random_matrix(6, rng);
  const double s1 = schatten_norm(a, 1.0), s2 = schatten_norm(a, 2.0);
  const double sinf = schatten_norm(a, std::numeric_limits<double>::infinity());
  CHECK(s1 >= s2);
  CHECK(s2 >= sinf);
  CHECK(s2 == doctest::Approx(a.norm()).epsilon(1e-12));  // Frobenius
  try {
    schatten_norm(a, 0.5);
    FAIL("expected InvalidP");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidP);
  }
}

TEST_CASE("schatten_norm: generalized Hoelder on exponentials") {
  std::mt19937_64 rng(4);
  const ComplexMatrix q = testing::random_unitary(8, rng);
  Eigen::VectorXd d(8);
  for (int k = 0; k < 8; ++k) d[k] = 0.2 + 0.5 * k;
  const ComplexMatrix h = q * d.cast<Complex>().asDiagonal() * q.adjoint();
  for (double p : {2.0, 4.0}) {
    const double lhs = schatten_norm(expm_oracle(-h), 1.0);
    const double rhs = std::pow(schatten_norm(expm_oracle(-h / p), p), p);
    CHECK(lhs <= rhs * (1.0 + 1e-9));
  }
}

TEST_CASE("matrix JSON round trip is bit exact") {
  std::mt19937_64 rng(1);
  const ComplexMatrix a = random_matrix(5, rng);
  const nlohmann::json j = matrix_to_json(a);
  const ComplexMatrix b = matrix_from_json(nlohmann::json::parse(j.dump()));
  CHECK(a == b);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"dim": 2, "entries": [[1,0]]})")),
                  Error);
}

TEST_CASE("pairwise_reduce does not depend on threads") {
  std::vector<double> v(1000);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (double& x : v) x = g(rng) * 1e8 + g(rng);
  auto leaf = [&](std::size_t k) { return v[k]; };
  const double one = pairwise_reduce<double>(0, v.size(), leaf, 1);
  for (unsigned t : {2u, 3u, 4u, 7u}) CHECK(pairwise_reduce<double>(0, v.size(), leaf, t) == one);
}

}  // TEST_SUITE
