#pragma once

#include <utility>
#include <vector>

#include "sectorial/rigging.hpp"

namespace sectorial {

/// R(zeta, T) = (T - zeta)^{-1}. Throws SpectrumHit near the spectrum of T.
ComplexMatrix rmap(Complex zeta, const FormMatrix& t, const Options& opt = {});

struct NeumannResult {
  ComplexMatrix partial_sum;  // sum_{k=0}^{n} H^{-1} (-T H^{-1})^k
  double ratio = 0.0;         // r = || L^{-*} T H^{-1} L^* ||
  double constant = 0.0;      // C with ||partial - (H+T)^{-1}|| <= C r^{n+1} / (1 - r)
  bool contractive = false;   // r < 1; otherwise the partial sum is not a bound
  double error_bound() const;
  int terms = 0;
};

/// Neumann expansion of (H + T)^{-1} around H, measured in the H- geometry
/// of the rigging `rg`.
NeumannResult neumann_resolvent(const FormMatrix& h, const FormMatrix& t,
                                const Rigging& rg, int n_terms, const Options& opt = {});

/// Errors ||S_k - (H+T)^{-1}|| of every partial sum k = 0..n_terms.
std::vector<double> neumann_error_curve(const FormMatrix& h, const FormMatrix& t,
                                        int n_terms, const Options& opt = {});

/// Least-squares slope of log(values[k]) over k in [first, last], returned as
/// the geometric ratio exp(slope). Non-positive values are skipped.
double geometric_ratio_fit(const std::vector<double>& values, std::size_t first,
                           std::size_t last);

struct ResolventBound {
  double lhs = 0.0;  // ||R(zeta, T)||
  double rhs = 0.0;  // 1 / dist(zeta, hull of the sampled numerical range)
};

/// Throws ZetaInsideRange if zeta lies in the circumscribed range polygon.
ResolventBound resolvent_bound_check(const FormMatrix& t, Complex zeta,
                                     const Options& opt = {});

}  // namespace sectorial
