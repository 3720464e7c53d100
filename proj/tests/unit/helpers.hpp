#pragma once

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "sectorial/forms.hpp"

namespace testing {

using sectorial::Complex;
using sectorial::ComplexMatrix;
using sectorial::ComplexVector;
using sectorial::Index;

inline double rel_err(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

inline ComplexMatrix diag(std::initializer_list<Complex> d) {
  ComplexVector v(static_cast<Index>(d.size()));
  Index k = 0;
  for (const Complex& z : d) v[k++] = z;
  return v.asDiagonal();
}

inline ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// Unitary from the QR factorisation of a gaussian matrix.
inline ComplexMatrix random_unitary(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(sectorial::random_matrix(n, rng));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

// H + i s K with H >= 1 hermitian (spectrum in [1, 1 + spread]) and K
// hermitian of unit norm, so Num lies in a sector of half-angle < atan(s).
inline ComplexMatrix random_sectorial(Index n, std::mt19937_64& rng, double s = 0.3,
                                      double spread = 4.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ComplexMatrix q = random_unitary(n, rng);
  Eigen::VectorXd d(n);
  for (Index k = 0; k < n; ++k) d[k] = 1.0 + spread * u(rng);
  const ComplexMatrix h = q * d.cast<Complex>().asDiagonal() * q.adjoint();
  ComplexMatrix k = sectorial::random_hermitian(n, rng);
  const double kn = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(k).eigenvalues().cwiseAbs().maxCoeff();
  k /= kn;
  return h + Complex(0.0, s) * k;
}

// Non-normal matrix with prescribed eigenvalues: V diag(lambda) V^{-1}.
inline ComplexMatrix with_spectrum(const ComplexVector& lambda, std::mt19937_64& rng,
                                   double skew = 0.3) {
  const Index n = lambda.size();
  ComplexMatrix v = ComplexMatrix::Identity(n, n) + skew * sectorial::random_matrix(n, rng) /
                                                        std::sqrt(double(n));
  return v * lambda.asDiagonal() * v.inverse();
}

}  // namespace testing
