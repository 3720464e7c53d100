#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <future>
#include <random>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sectorial/error.hpp"
#include "sectorial/options.hpp"

namespace sectorial {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Eigen-decomposition of a general square matrix. Eigenvalues are sorted by
/// ascending real part, then ascending imaginary part; column k of
/// `eigenvectors` is the unit right eigenvector for `eigenvalues[k]`.
struct SpectralData {
  ComplexVector eigenvalues;
  ComplexMatrix eigenvectors;
  double condition = 1.0;  // 2-norm condition number of the eigenvector matrix
};

/// Hermitian eigen-decomposition, eigenvalues ascending.
struct HermitianSpectrum {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

// Cheap norm used for scale-relative thresholds (max column sum).
double norm1(const ComplexMatrix& a);

/// Solves AX = B by partial-pivot LU. Throws SingularMatrix when a pivot falls
/// below pivot_tolerance * ||A||_1.
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b,
                    const Options& opt = {});
ComplexMatrix inverse(const ComplexMatrix& a, const Options& opt = {});

SpectralData eig_oracle(const ComplexMatrix& a, const Options& opt = {});
HermitianSpectrum hermitian_eig(const ComplexMatrix& h);
double lambda_min_hermitian(const ComplexMatrix& h);
double lambda_max_hermitian(const ComplexMatrix& h);

/// Pade scaling-and-squaring exponential. Throws Overflow above
/// opt.expm_norm_cap.
ComplexMatrix expm_oracle(const ComplexMatrix& a, const Options& opt = {});

RealVector singular_values(const ComplexMatrix& a);
double spectral_norm(const ComplexMatrix& a);
double min_singular_value(const ComplexMatrix& a);

/// (sum_k sigma_k^p)^(1/p); p = infinity gives the spectral norm.
double schatten_norm(const ComplexMatrix& a, double p);

bool is_hermitian(const ComplexMatrix& a, double rel_tol = 1e-12);
Complex trace(const ComplexMatrix& a);

// {"dim": n, "entries": [[re, im], ...]} in row-major order.
nlohmann::json matrix_to_json(const ComplexMatrix& a);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

// Random inputs for probes and sampling. Entries are standard complex normal.
ComplexMatrix random_matrix(Index n, std::mt19937_64& rng);
ComplexMatrix random_hermitian(Index n, std::mt19937_64& rng);
ComplexVector random_vector(Index n, std::mt19937_64& rng);
ComplexVector random_unit_vector(Index n, std::mt19937_64& rng);

/// Sums leaf(0) + ... + leaf(n-1) along a balanced binary tree whose shape
/// depends only on n, so the floating-point result is identical for any
/// thread count. Leaves are evaluated lazily; at most `threads` subtrees run
/// concurrently.
template <class T, class Leaf>
T pairwise_reduce(std::size_t lo, std::size_t hi, const Leaf& leaf,
                  unsigned threads = 1) {
  if (hi - lo == 1) return leaf(lo);
  const std::size_t mid = lo + (hi - lo) / 2;
  if (threads > 1) {
    auto left = std::async(std::launch::async, [&] {
      return pairwise_reduce<T>(lo, mid, leaf, threads / 2);
    });
    T right = pairwise_reduce<T>(mid, hi, leaf, threads - threads / 2);
    T sum = left.get();
    sum += right;
    return sum;
  }
  T sum = pairwise_reduce<T>(lo, mid, leaf, 1);
  sum += pairwise_reduce<T>(mid, hi, leaf, 1);
  return sum;
}

}  // namespace sectorial
