#include "sectorial/rigging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sectorial {

namespace {

double distance_to_sector_edge(const Sector& s, Complex z) {
  const Complex w = z - s.vertex;
  double best = std::numeric_limits<double>::infinity();
  for (double sign : {1.0, -1.0}) {
    const Complex local = std::conj(std::polar(1.0, sign * s.half_angle)) * w;
    best = std::min(best, local.real() <= 0.0 ? std::abs(w) : std::abs(local.imag()));
  }
  return best;
}

}  // namespace

ComplexMatrix Rigging::represent(const ComplexMatrix& t) const {
  const auto lower = factor.adjoint().triangularView<Eigen::Lower>();
  const ComplexMatrix x = lower.solve(t);                       // L^{-*} T
  return lower.solve(x.adjoint()).adjoint();                    // (L^{-*} X*)*
}

Rigging make_h_plus(const FormMatrix& h) {
  const auto [hr, hi] = hermitian_split(h);
  (void)hi;
  double lmin = 0.0;
  try {
    lmin = lambda_min_hermitian(hr.matrix());
  } catch (const Error& e) {
    throw Error(ErrorCode::NotHermitianizable, e.what());
  }
  const double m = std::max(0.0, 1.0 - lmin);
  const Index n = h.dim();
  ComplexMatrix hp = hr.matrix() + m * ComplexMatrix::Identity(n, n);
  Eigen::LLT<ComplexMatrix> llt(hp);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotHermitianizable, "Cholesky of h+ failed");
  }
  Rigging rg;
  rg.factor = llt.matrixU();
  rg.h_plus = FormMatrix(std::move(hp));
  rg.shift = m;
  return rg;
}

double class_norm(const FormMatrix& t, const Rigging& rg) {
  if (t.dim() != rg.dim()) throw Error(ErrorCode::DimensionMismatch, "class_norm");
  return spectral_norm(rg.represent(t.matrix()));
}

double pseudo_cauchy_schwarz_margin(const FormMatrix& t, const Rigging& rg, int trials,
                                    std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (t.dim() != rg.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "pseudo_cauchy_schwarz_margin");
  }
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    const ComplexVector x = random_vector(t.dim(), rng);
    const ComplexVector y = random_vector(t.dim(), rng);
    const double num = std::norm(t(x, y));
    const double den = rg.h_plus.quadratic(x).real() * rg.h_plus.quadratic(y).real();
    worst = std::max(worst, num / den);
  }
  return worst;
}

RelativeBoundProfile relative_bound_profile(const FormMatrix& t, const FormMatrix& h,
                                            const std::vector<double>& a_grid,
                                            const Options& opt) {
  if (t.dim() != h.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "relative_bound_profile");
  }
  for (std::size_t k = 0; k < a_grid.size(); ++k) {
    if (!(a_grid[k] > 0.0) || (k > 0 && !(a_grid[k] > a_grid[k - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "a_grid must be positive and increasing");
    }
  }
  const Rigging rg = make_h_plus(h);
  const HermitianSpectrum hs = hermitian_eig(rg.h_plus.matrix());
  // Work in the eigenbasis of h+, where (a + h+)^{-1/2} is diagonal.
  const ComplexMatrix rotated = hs.eigenvectors.adjoint() * t.matrix() * hs.eigenvectors;
  RelativeBoundProfile out;
  out.a = a_grid;
  out.b.reserve(a_grid.size());
  for (double a : a_grid) {
    const RealVector w = (hs.eigenvalues.array() + a).rsqrt().matrix();
    const ComplexMatrix scaled = w.asDiagonal() * rotated * w.asDiagonal();
    out.b.push_back(spectral_norm(scaled));
  }
  out.kato_tiny = !out.b.empty() && out.b.back() < opt.tiny_threshold;
  return out;
}

double sectorial_iso_check(const FormMatrix& t, const Rigging& rg) {
  if (t.dim() != rg.dim()) throw Error(ErrorCode::DimensionMismatch, "sectorial_iso_check");
  const auto [tr, ti] = hermitian_split(t);
  (void)ti;
  const double lmin = lambda_min_hermitian(tr.matrix());
  if (lmin < 1.0 - 1e-10) {
    throw Error(ErrorCode::NotCoercive,
                "t^r has lambda_min " + std::to_string(lmin) + " < 1");
  }
  return min_singular_value(rg.represent(t.matrix()));
}

double sector_stability_radius(const NumericalRangeBoundary& range_of_t, const Rigging& rg,
                               const Sector& dilated) {
  double d = std::numeric_limits<double>::infinity();
  for (const Complex& p : range_of_t.points) {
    if (!dilated.contains(p)) return 0.0;
    d = std::min(d, distance_to_sector_edge(dilated, p));
  }
  return d / lambda_max_hermitian(rg.h_plus.matrix());
}

}  // namespace sectorial
