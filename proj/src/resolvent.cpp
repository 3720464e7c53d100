#include "sectorial/resolvent.hpp"

#include <cmath>
#include <limits>

namespace sectorial {

ComplexMatrix rmap(Complex zeta, const FormMatrix& t, const Options& opt) {
  const Index n = t.dim();
  const ComplexMatrix shifted = t.matrix() - zeta * ComplexMatrix::Identity(n, n);
  try {
    return inverse(shifted, opt);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularMatrix) {
      throw Error(ErrorCode::SpectrumHit, "zeta is numerically in the spectrum of T");
    }
    throw;
  }
}

double NeumannResult::error_bound() const {
  if (!contractive) return std::numeric_limits<double>::infinity();
  return constant * std::pow(ratio, terms + 1) / (1.0 - ratio);
}

NeumannResult neumann_resolvent(const FormMatrix& h, const FormMatrix& t,
                                const Rigging& rg, int n_terms, const Options& opt) {
  if (h.dim() != t.dim() || h.dim() != rg.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "neumann_resolvent");
  }
  if (n_terms < 0) throw Error(ErrorCode::InvalidArgument, "n_terms must be >= 0");
  const ComplexMatrix h_inv = inverse(h.matrix(), opt);
  const ComplexMatrix step = -t.matrix() * h_inv;  // -T H^{-1}

  // r in the H- geometry: L^{-*} (T H^{-1}) L^*.
  const auto lower = rg.factor.adjoint().triangularView<Eigen::Lower>();
  const ComplexMatrix th = t.matrix() * h_inv;
  const ComplexMatrix conj_th = lower.solve(th * rg.factor.adjoint());
  NeumannResult out;
  out.ratio = spectral_norm(conj_th);
  out.contractive = out.ratio < 1.0;
  out.terms = n_terms;
  const ComplexMatrix l_inv_adj =
      lower.solve(ComplexMatrix::Identity(h.dim(), h.dim()));  // L^{-*}
  out.constant = spectral_norm(h_inv * rg.factor.adjoint()) * spectral_norm(l_inv_adj);

  ComplexMatrix power = ComplexMatrix::Identity(h.dim(), h.dim());
  ComplexMatrix series = power;
  for (int k = 1; k <= n_terms; ++k) {
    power = power * step;
    series += power;
  }
  out.partial_sum = h_inv * series;
  return out;
}

std::vector<double> neumann_error_curve(const FormMatrix& h, const FormMatrix& t,
                                        int n_terms, const Options& opt) {
  const ComplexMatrix exact = inverse(h.matrix() + t.matrix(), opt);
  const ComplexMatrix h_inv = inverse(h.matrix(), opt);
  const ComplexMatrix step = -t.matrix() * h_inv;
  std::vector<double> errors;
  errors.reserve(static_cast<std::size_t>(n_terms) + 1);
  ComplexMatrix power = ComplexMatrix::Identity(h.dim(), h.dim());
  ComplexMatrix series = power;
  errors.push_back(spectral_norm(h_inv * series - exact));
  for (int k = 1; k <= n_terms; ++k) {
    power = power * step;
    series += power;
    errors.push_back(spectral_norm(h_inv * series - exact));
  }
  return errors;
}

double geometric_ratio_fit(const std::vector<double>& values, std::size_t first,
                           std::size_t last) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (std::size_t k = first; k <= last && k < values.size(); ++k) {
    if (!(values[k] > 0.0)) continue;
    const double x = static_cast<double>(k);
    const double y = std::log(values[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw Error(ErrorCode::NotEnoughTerms, "geometric_ratio_fit");
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return std::exp(slope);
}

ResolventBound resolvent_bound_check(const FormMatrix& t, Complex zeta,
                                     const Options& opt) {
  const NumericalRangeBoundary b = numerical_range(t, opt.range_nodes);
  const double dist = b.outer_distance(zeta);
  if (!(dist > 0.0)) {
    throw Error(ErrorCode::ZetaInsideRange, "zeta lies inside the numerical range hull");
  }
  ResolventBound out;
  out.lhs = spectral_norm(rmap(zeta, t, opt));
  out.rhs = 1.0 / dist;
  return out;
}

}  // namespace sectorial
