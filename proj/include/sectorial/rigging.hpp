#pragma once

#include <cstdint>
#include <vector>

#include "sectorial/forms.hpp"

namespace sectorial {

/// Finite-dimensional Hilbert rigging generated by a coercive hermitian form
/// h+ >= 1. The H+ norm is ||psi||_+ = ||L psi|| with h+ = L* L, L upper
/// triangular with positive diagonal; H- carries the dual norm ||L^{-*} x||.
struct Rigging {
  FormMatrix h_plus;
  ComplexMatrix factor;  // L
  double shift = 0.0;    // m in h+ = m I + h^r

  Index dim() const { return factor.rows(); }
  /// L^{-*} T L^{-1}: the H+ -> H- operator of t as an operator on C^n.
  ComplexMatrix represent(const ComplexMatrix& t) const;
};

/// h+ = m I + h^r with m = max(0, 1 - lambda_min(h^r)).
Rigging make_h_plus(const FormMatrix& h);

/// Norm of t as a bounded map H+ -> H-.
double class_norm(const FormMatrix& t, const Rigging& rg);

/// max |t[x,y]|^2 / (h+[x] h+[y]) over random samples; never exceeds
/// class_norm(t)^2.
double pseudo_cauchy_schwarz_margin(const FormMatrix& t, const Rigging& rg,
                                    int trials, std::uint64_t seed = 1);

struct RelativeBoundProfile {
  std::vector<double> a;
  std::vector<double> b;  // b(a), non-increasing
  bool kato_tiny = false;  // sufficient criterion b(a_max) < tiny_threshold
};

/// b(a) = || (a + h+)^{-1/2} T (a + h+)^{-1/2} || for each a, where h+ is the
/// rigging of h. Then |t[psi]| <= b(a) (a ||psi||^2 + h+[psi]).
RelativeBoundProfile relative_bound_profile(const FormMatrix& t, const FormMatrix& h,
                                            const std::vector<double>& a_grid,
                                            const Options& opt = {});

/// Smallest singular value of L^{-*} T L^{-1}. Requires t^r >= 1.
double sectorial_iso_check(const FormMatrix& t, const Rigging& rg);

/// Radius rho such that every s with class_norm(s - t) < rho keeps its
/// numerical range inside `dilated`: the distance of Num t to the complement
/// of `dilated`, divided by lambda_max(h+).
double sector_stability_radius(const NumericalRangeBoundary& range_of_t,
                               const Rigging& rg, const Sector& dilated);

}  // namespace sectorial
