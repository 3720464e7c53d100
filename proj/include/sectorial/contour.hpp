#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sectorial/forms.hpp"

namespace sectorial {

using ScalarFunction = std::function<Complex(Complex)>;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int order);

// Contour variants. Closed variants run anticlockwise around what they
// enclose; SectorBoundary runs from the far end of the upper ray through the
// vertex out along the lower ray, so the wedge interior is on its left.

struct Circle {
  Complex center{0.0, 0.0};
  double radius = 1.0;
  int nodes = 64;  // trapezoid points
};

/// Closed polygon through `vertices` (the last vertex joins the first).
struct Polyline {
  std::vector<Complex> vertices;
  int order = 16;          // Gauss-Legendre points per panel
  double max_panel = 0.0;  // 0: one panel per edge
};

/// Vertical line Re = gamma, closed on the left by the edges of a dilation
/// of `sector` (vertex moved left by delta, half-angle halfway to pi/2).
struct RightBoundary {
  double gamma = 0.0;
  Sector sector;
  int order = 16;
  double max_panel = 0.0;  // 0: chosen from the distance to the spectrum
};

/// Boundary of Sec(vertex, half_angle), truncated at distance `radius` from
/// the vertex. Panels grow with the distance to `keep_out` when given.
struct SectorBoundary {
  double vertex = 0.0;
  double half_angle = kPi / 4;
  double radius = 10.0;
  int order = 16;
  int panels_per_ray = 8;  // used when keep_out is empty
  std::optional<Sector> keep_out;
};

using Contour = std::variant<Circle, Polyline, RightBoundary, SectorBoundary>;

/// Quadrature for int f(zeta) d zeta along the contour.
struct QuadratureRule {
  std::vector<Complex> nodes;
  std::vector<Complex> weights;  // include d zeta
  std::vector<double> spacing;   // local node spacing, for enclosure checks
  bool closed = true;

  std::size_t size() const { return nodes.size(); }
};

/// Builds the rule. RightBoundary needs `eigenvalues` when max_panel == 0.
QuadratureRule quadrature(const Contour& c, const Options& opt = {},
                          const ComplexVector* eigenvalues = nullptr);

struct SelfTest {
  double closure = 0.0;  // |sum w|
  double winding = 0.0;  // |sum w / (zeta - z0) - 2 pi i|
};
SelfTest self_test(const QuadratureRule& rule, Complex z0);

/// (1 / 2 pi i) sum w / (zeta - z), rounded: how often the rule winds around z.
int winding_number(const QuadratureRule& rule, Complex z);

/// Throws ContourThroughSpectrum if any eigenvalue is closer to a node than
/// factor * local spacing.
void validate_enclosure(const QuadratureRule& rule, const ComplexVector& eigenvalues,
                        double factor);

/// -sum_j w_j f_k(zeta_j) (A - zeta_j)^{-1} / 2 pi i for each f_k, with one
/// factorisation per node and a fixed pairwise summation tree.
std::vector<ComplexMatrix> contour_integrals(const ComplexMatrix& a,
                                             const QuadratureRule& rule,
                                             std::span<const ScalarFunction> fs,
                                             const Options& opt = {});

ComplexMatrix riesz_projection(const ComplexMatrix& a, const Contour& c,
                               const Options& opt = {});
ComplexMatrix projected_operator(const ComplexMatrix& a, const Contour& c,
                                 const Options& opt = {});
ComplexMatrix rdt_function(const ComplexMatrix& a, const Contour& c,
                           const ScalarFunction& f, const Options& opt = {});

/// Tr A(Gamma) for a contour holding exactly one nondegenerate eigenvalue.
Complex extract_eigenvalue(const ComplexMatrix& a, const Contour& c,
                           const Options& opt = {});

/// Projection and projected operator together (one pass over the nodes).
struct Enclosure {
  ComplexMatrix projection;
  ComplexMatrix projected;
};
Enclosure enclose(const ComplexMatrix& a, const Contour& c, const Options& opt = {});

int rank_of_projection(const ComplexMatrix& p);

struct LowEnergyPart {
  ComplexMatrix projection;
  ComplexMatrix hamiltonian;  // A P
};
LowEnergyPart low_energy_hamiltonian(const ComplexMatrix& a, const RightBoundary& gamma,
                                     const Options& opt = {});

/// Polygon used by a RightBoundary; empty when gamma is left of the wedge.
std::vector<Complex> right_boundary_polygon(const RightBoundary& gamma,
                                            const Options& opt = {});

}  // namespace sectorial
