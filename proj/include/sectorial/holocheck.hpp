#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "sectorial/numcore.hpp"

namespace sectorial {

// One-dimensional slices zeta -> F(x + zeta w), centred at zeta = 0.
using ScalarSlice = std::function<Complex(Complex)>;
using MatrixSlice = std::function<ComplexMatrix(Complex)>;

/// Weak-operator functional M -> <a, M b>.
struct Probe {
  ComplexVector a;
  ComplexVector b;
  Complex operator()(const ComplexMatrix& m) const { return a.dot(m * b); }
};

/// `count` unit-vector probe pairs from a fixed seed.
std::vector<Probe> make_probes(Index n, int count = 5, std::uint64_t seed = 7);

struct Residual {
  double absolute = 0.0;  // |sum of the trapezoid rule for the closed integral|
  double relative = 0.0;  // absolute / (2 pi r max|g|)
};

/// Trapezoid value of the closed integral of g over |zeta| = r.
Residual cauchy_residual(const ScalarSlice& g, double r, int m);

/// Nodes r e^{2 pi i j / m}, j = 0..m-1.
std::vector<Complex> circle_points(double r, int m);

/// Residual from values already sampled at circle_points(r, m).
Residual cauchy_residual(const std::vector<Complex>& values, double r);

/// Worst relative residual over probes; F is evaluated once per node.
Residual cauchy_residual(const MatrixSlice& f, double r, int m,
                         const std::vector<Probe>& probes);

/// c_k = (1/m) sum_j g(r e^{i theta_j}) e^{-i k theta_j} r^{-k}, k = 0..k_max.
std::vector<Complex> taylor_coefficients(const ScalarSlice& g, double r, int m, int k_max);

/// Same from values already sampled at circle_points(r, values.size()).
std::vector<Complex> taylor_coefficients(const std::vector<Complex>& values, double r,
                                         int k_max);

/// Entrywise Taylor coefficients of a matrix slice.
std::vector<ComplexMatrix> taylor_coefficients(const MatrixSlice& f, double r, int m,
                                               int k_max);

/// 1 / limsup |c_k|^{1/k} from a least-squares fit of log|c_k| over the upper
/// half of k. Infinity when the trailing coefficients vanish (polynomial).
double radius_estimate(const std::vector<Complex>& coeffs);

struct DerivativeCheck {
  Complex contour{0.0, 0.0};  // c_1
  Complex finite_difference{0.0, 0.0};
  double relative = 0.0;
};

/// c_1 against the central difference (g(h) - g(-h)) / 2h.
DerivativeCheck derivative_check(const ScalarSlice& g, double r, int m, double h = 1e-5);

using BallMap = std::function<ComplexMatrix(const ComplexVector&)>;
using MatrixNorm = std::function<double(const ComplexMatrix&)>;

struct BoundednessScan {
  double max_norm = 0.0;
  ComplexVector argmax;
  bool exceeded = false;  // max_norm > cap
};

/// Max of norm(F(p)) over `samples` uniform points of the complex ball
/// |p - center| <= radius. The spectral norm is used when `norm` is empty.
BoundednessScan local_boundedness_scan(const BallMap& f, const ComplexVector& center,
                                       double radius, int samples, std::uint64_t seed = 11,
                                       const MatrixNorm& norm = {},
                                       double cap = std::numeric_limits<double>::infinity());

/// Log of each value, with the phase continued along the sequence. For free
/// energy slices, where Log Z must follow one branch around the circle.
std::vector<Complex> unwrapped_log(const std::vector<Complex>& values);

}  // namespace sectorial
