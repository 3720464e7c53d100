#pragma once

#include <utility>
#include <vector>

#include "sectorial/numcore.hpp"

namespace sectorial {

/// A sesquilinear form t[phi, psi] = phi* T psi on C^n, stored as its matrix T.
class FormMatrix {
 public:
  FormMatrix() = default;
  explicit FormMatrix(ComplexMatrix m);

  static FormMatrix identity(Index n) {
    return FormMatrix(ComplexMatrix::Identity(n, n));
  }
  static FormMatrix zero(Index n) { return FormMatrix(ComplexMatrix::Zero(n, n)); }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

  Complex operator()(const ComplexVector& phi, const ComplexVector& psi) const {
    return phi.dot(m_ * psi);  // dot conjugates its left operand
  }
  Complex quadratic(const ComplexVector& psi) const { return (*this)(psi, psi); }

  FormMatrix& operator+=(const FormMatrix& o);
  FormMatrix& operator-=(const FormMatrix& o);
  FormMatrix& operator*=(Complex c);

  friend FormMatrix operator+(FormMatrix a, const FormMatrix& b) { return a += b; }
  friend FormMatrix operator-(FormMatrix a, const FormMatrix& b) { return a -= b; }
  friend FormMatrix operator*(Complex c, FormMatrix a) { return a *= c; }

 private:
  ComplexMatrix m_;
};

/// Right-facing wedge {vertex + r e^{i phi} : r >= 0, |phi| <= half_angle}.
struct Sector {
  double vertex = 0.0;
  double half_angle = 0.0;

  Sector() = default;
  Sector(double vertex, double half_angle);

  bool contains(Complex z, double slack = 0.0) const;
  /// Euclidean distance from z to the wedge (0 inside).
  double distance(Complex z) const;
};

/// Boundary sweep of the numerical range. points[k] maximises
/// Re(e^{-i angles[k]} z) over Num t, with maximum support[k].
struct NumericalRangeBoundary {
  std::vector<double> angles;
  std::vector<Complex> points;
  std::vector<double> support;

  double max_modulus() const;
  /// Every consecutive edge turns the same way, up to slack * scale^2.
  bool is_convex(double slack = 1e-10) const;
  /// Vertices of the circumscribed polygon cut out by the support lines.
  std::vector<Complex> outer_polygon() const;
  /// Distance from z to the circumscribed polygon; 0 when z lies inside.
  double outer_distance(Complex z) const;
  /// Distance from z to the convex hull of the boundary points; 0 inside.
  double inner_distance(Complex z) const;
};

std::pair<FormMatrix, FormMatrix> hermitian_split(const FormMatrix& t);
FormMatrix adjoint_form(const FormMatrix& t);

NumericalRangeBoundary numerical_range(const FormMatrix& t, int nodes = 256);

/// Golden-section search over real vertices in [min Re - spread, min Re] for
/// the sector of smallest half-angle holding every boundary point, widened
/// by `margin`. Throws NotSectorial if the half-angle reaches pi/2 - margin.
Sector fit_sector(const NumericalRangeBoundary& b, double margin);

/// Exact test of Num t inside a sector through three hermitian eigenvalue
/// problems (two edge half-planes and the vertex line).
bool range_in_sector(const FormMatrix& t, const Sector& s, double tol = 1e-10);

/// Largest real vertex c with Num t inside Sec(c, half_angle), half_angle > 0.
double tightest_vertex(const FormMatrix& t, double half_angle);

}  // namespace sectorial
