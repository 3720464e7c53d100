#pragma once

#include <vector>

#include "sectorial/contour.hpp"

namespace sectorial {

/// Gibbs-type quantities at a (possibly complex) inverse temperature.
struct ThermalState {
  Complex beta;
  ComplexMatrix e_matrix;  // e^{-beta H}
  Complex z;               // partition function Tr e^{-beta H}
  Complex f;               // free energy -Log(Z) / beta, principal branch
  ComplexMatrix rho;       // e_matrix / z
};

/// Adapted contour for the E-map: boundary of Sec(c1 - delta, theta2), where
/// theta2 is halfway between the sector half-angle and pi/2 - |arg beta|, and
/// c1 is the rightmost vertex whose wedge of half-angle (theta + theta2)/2
/// still holds Num t. Truncated where |e^{-beta zeta}| drops below
/// opt.truncation relative to its value at the vertex. The contour is built
/// for the hardest of `betas` (largest |arg|, slowest decay).
SectorBoundary adapted_contour(const std::vector<Complex>& betas, const FormMatrix& t,
                               const Sector& sector, const Options& opt = {});

/// e^{-beta T} by contour quadrature over the adapted sector boundary.
ComplexMatrix emap(Complex beta, const FormMatrix& t, const Sector& sector,
                   const Options& opt = {});

/// e^{-beta_k T} for several betas sharing one contour.
std::vector<ComplexMatrix> emap_many(const std::vector<Complex>& betas, const FormMatrix& t,
                                     const Sector& sector, const Options& opt = {});

ThermalState thermal_state(Complex beta, const FormMatrix& t, const Sector& sector,
                           const Options& opt = {});

/// Free energies along a path of partition-function values, with Log Z
/// phase-unwrapped so the result is continuous in the path parameter.
std::vector<Complex> free_energy_path(const std::vector<Complex>& betas,
                                      const std::vector<Complex>& zs);

Complex thermal_expectation(const ThermalState& state, const ComplexMatrix& b);

/// int_0^1 e^{-s beta H} (-beta T) e^{-(1-s) beta H} ds by Gauss-Legendre in s:
/// the derivative of e^{-beta (H + eps T)} at eps = 0. The sector for H is
/// fitted from its numerical range.
ComplexMatrix duhamel_first_order(Complex beta, const FormMatrix& h, const FormMatrix& t_dir,
                                  int s_nodes = 16, const Options& opt = {});

/// ||t||_{H0} = ||T^r H0^{-1}|| + ||T^i H0^{-1}||, for hermitian h0 >= 1.
double of_norm(const FormMatrix& t, const FormMatrix& h0);

}  // namespace sectorial
