#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "sectorial/forms.hpp"

namespace sectorial {

/// Periodic lattice with n sites per dimension and spacing delta.
/// Site index s = x0 + n * x1; directed link index = s * d + mu, running from
/// s to its +mu neighbour.
struct Grid {
  int d = 1;
  int n = 3;
  double delta = 1.0;

  Grid() = default;
  Grid(int d, int n, double delta);

  Index sites() const;
  Index links() const { return sites() * d; }
  std::array<int, 2> coords(Index site) const;
  Index site(std::array<int, 2> c) const;
  Index neighbor(Index site, int mu) const;
  double cell_volume() const;  // delta^d

  /// Index of the periodic difference a - b, used to address kernels.
  Index displacement(Index a, Index b) const;
  /// Signed components of the minimal periodic representative of a
  /// displacement index, each in (-n/2, n/2]; ties resolve to +n/2.
  std::array<int, 2> minimal_displacement(Index disp) const;
};

/// N distinguishable particles on a grid; configuration index
/// flat = ((s_0 * S) + s_1) * S + s_2 with S = sites.
class ManyBodySpace {
 public:
  static constexpr Index kMaxDim = 2048;

  ManyBodySpace(Grid grid, int particles);

  const Grid& grid() const noexcept { return grid_; }
  int particles() const noexcept { return particles_; }
  Index dim() const noexcept { return dim_; }

  Index encode(const std::vector<Index>& sites) const;
  std::vector<Index> decode(Index flat) const;
  Index site_of(Index flat, int particle) const;
  Index with_site(Index flat, int particle, Index site) const;

 private:
  Grid grid_;
  int particles_;
  Index dim_;
  std::vector<Index> stride_;
};

/// Fields entering the Hamiltonian form. u, f, u0 live on sites, A on
/// directed links, v and v0 on displacement indices.
struct FieldConfig {
  ComplexVector u;
  ComplexVector a;
  ComplexVector v;
  ComplexVector f;
  RealVector u0;
  RealVector v0;

  static FieldConfig zeros(const Grid& g);
  /// Throws InvalidField on wrong sizes or negative backgrounds.
  void validate(const Grid& g) const;
  /// x + zeta w in the (u, A, v, f) coordinates; backgrounds kept from x.
  FieldConfig displaced(const FieldConfig& w, Complex zeta) const;
};

/// Covariant midpoint differences per particle:
/// (D_A psi)_l = (psi_head - psi_tail)/delta - i A_l (psi_head + psi_tail)/2,
/// k_A[phi, psi] = sum conj(D_{conj A} phi) (D_A psi). Entries are polynomial
/// in A with no complex conjugation.
FormMatrix kinetic_form(const ManyBodySpace& space, const ComplexVector& a);
/// d/d eps of kinetic_form(a + eps da) at eps = 0.
FormMatrix kinetic_derivative(const ManyBodySpace& space, const ComplexVector& a,
                              const ComplexVector& da);

/// Diagonal sum_alpha w(x_alpha) for a site field (per_particle = true), or
/// the diagonal w(x) itself for a configuration-space field.
FormMatrix potential_form(const ManyBodySpace& space, const ComplexVector& w,
                          bool per_particle = true);

/// Diagonal (1/2) sum_{alpha != beta} v(x_alpha - x_beta).
FormMatrix interaction_form(const ManyBodySpace& space, const ComplexVector& v);

/// Kernel v(r) = fn(|r| delta) over the minimal periodic displacement.
template <class Fn>
ComplexVector radial_kernel(const Grid& g, Fn fn) {
  ComplexVector v(g.sites());
  for (Index k = 0; k < g.sites(); ++k) {
    const auto m = g.minimal_displacement(k);
    const double r2 = double(m[0]) * m[0] + double(m[1]) * m[1];
    v[k] = fn(std::sqrt(r2) * g.delta);
  }
  return v;
}

/// k_A + U(u0 + u + f u0) + V(v0 + v). Throws ModulationTooLarge if
/// ||f||_inf >= 1.
FormMatrix family(const ManyBodySpace& space, const FieldConfig& x);
/// Exact directional derivative of `family` at x along w.
FormMatrix family_derivative(const ManyBodySpace& space, const FieldConfig& x,
                             const FieldConfig& w);

struct ChargeCurrent {
  ComplexVector rho;  // per site, density per unit cell volume
  ComplexVector j;    // per directed link
};

/// Densities of a biorthogonal pair with <eta, phi> = 1, normalised so that
/// rho_j = dE/du_j / delta^d and J_l = dE/dA_l / delta^d. Sum rho delta^d = N.
ChargeCurrent charge_current_from_pair(const ManyBodySpace& space, const ComplexVector& phi,
                                       const ComplexVector& eta, const ComplexVector& a,
                                       double tol = 1e-8);

}  // namespace sectorial
