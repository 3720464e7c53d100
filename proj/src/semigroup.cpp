#include "sectorial/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sectorial {

SectorBoundary adapted_contour(const std::vector<Complex>& betas, const FormMatrix& t,
                               const Sector& sector, const Options& opt) {
  if (betas.empty()) throw Error(ErrorCode::InvalidArgument, "adapted_contour: no beta");
  double max_arg = 0.0;
  for (const Complex& b : betas) {
    if (b == Complex(0.0)) {
      throw Error(ErrorCode::InvalidArgument, "adapted_contour: beta = 0");
    }
    const double arg = std::abs(std::arg(b));
    if (!(arg + sector.half_angle < kPi / 2)) {
      throw Error(ErrorCode::NotSectorialForBeta,
                  "|arg beta| + half-angle reaches pi/2");
    }
    max_arg = std::max(max_arg, arg);
  }
  const double theta2 = 0.5 * (sector.half_angle + kPi / 2 - max_arg);
  const double theta1 = 0.5 * (sector.half_angle + theta2);
  const double c1 = tightest_vertex(t, theta1);

  double kappa = std::numeric_limits<double>::infinity();
  for (const Complex& b : betas) {
    kappa = std::min(kappa, std::abs(b) * std::cos(std::abs(std::arg(b)) + theta2));
  }
  SectorBoundary sb;
  sb.vertex = c1 - opt.sector_delta;
  sb.half_angle = theta2;
  sb.radius = std::max(-std::log(opt.truncation) / kappa, 4.0 * opt.sector_delta);
  sb.order = opt.gauss_order;
  sb.keep_out = Sector(c1, theta1);
  return sb;
}

std::vector<ComplexMatrix> emap_many(const std::vector<Complex>& betas, const FormMatrix& t,
                                     const Sector& sector, const Options& opt) {
  if (!range_in_sector(t, sector)) {
    throw Error(ErrorCode::SectorViolation, "numerical range leaves the given sector");
  }
  const Index n = t.dim();
  std::vector<Complex> nonzero;
  for (const Complex& b : betas) {
    if (b != Complex(0.0)) nonzero.push_back(b);
  }
  std::vector<ComplexMatrix> out(betas.size());
  if (!nonzero.empty()) {
    const SectorBoundary sb = adapted_contour(nonzero, t, sector, opt);
    const QuadratureRule rule = quadrature(sb, opt);
    std::vector<ScalarFunction> fs;
    fs.reserve(nonzero.size());
    for (const Complex& b : nonzero) {
      fs.emplace_back([b](Complex z) { return std::exp(-b * z); });
    }
    auto mats = contour_integrals(t.matrix(), rule, fs, opt);
    std::size_t k = 0;
    for (std::size_t j = 0; j < betas.size(); ++j) {
      if (betas[j] != Complex(0.0)) out[j] = std::move(mats[k++]);
    }
  }
  for (std::size_t j = 0; j < betas.size(); ++j) {
    if (betas[j] == Complex(0.0)) out[j] = ComplexMatrix::Identity(n, n);
  }
  return out;
}

ComplexMatrix emap(Complex beta, const FormMatrix& t, const Sector& sector,
                   const Options& opt) {
  return std::move(emap_many({beta}, t, sector, opt).front());
}

ThermalState thermal_state(Complex beta, const FormMatrix& t, const Sector& sector,
                           const Options& opt) {
  if (beta == Complex(0.0)) {
    throw Error(ErrorCode::InvalidArgument, "free energy needs beta != 0");
  }
  ThermalState s;
  s.beta = beta;
  s.e_matrix = emap(beta, t, sector, opt);
  s.z = trace(s.e_matrix);
  if (!(std::abs(s.z) > opt.z_floor * static_cast<double>(t.dim()))) {
    throw Error(ErrorCode::ZeroPartitionFunction,
                "|Z| = " + std::to_string(std::abs(s.z)) + " at or below z_floor");
  }
  s.f = -std::log(s.z) / beta;
  s.rho = s.e_matrix / s.z;
  return s;
}

std::vector<Complex> free_energy_path(const std::vector<Complex>& betas,
                                      const std::vector<Complex>& zs) {
  if (betas.size() != zs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "free_energy_path");
  }
  std::vector<Complex> out;
  out.reserve(zs.size());
  double prev_phase = 0.0;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    double phase = std::arg(zs[k]);
    if (k > 0) phase += 2.0 * kPi * std::round((prev_phase - phase) / (2.0 * kPi));
    prev_phase = phase;
    out.push_back(-Complex(std::log(std::abs(zs[k])), phase) / betas[k]);
  }
  return out;
}

Complex thermal_expectation(const ThermalState& state, const ComplexMatrix& b) {
  if (b.rows() != state.rho.rows() || b.cols() != state.rho.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "thermal_expectation");
  }
  return (state.rho * b).trace();
}

ComplexMatrix duhamel_first_order(Complex beta, const FormMatrix& h, const FormMatrix& t_dir,
                                  int s_nodes, const Options& opt) {
  if (h.dim() != t_dir.dim()) throw Error(ErrorCode::DimensionMismatch, "duhamel");
  if (s_nodes < 1) throw Error(ErrorCode::InvalidArgument, "s_nodes must be >= 1");
  const Sector sector = fit_sector(numerical_range(h, opt.range_nodes), opt.sector_margin);
  const GaussRule g = gauss_legendre(s_nodes);
  std::vector<Complex> betas;
  betas.reserve(g.nodes.size());
  for (double x : g.nodes) betas.push_back(0.5 * (1.0 + x) * beta);
  // Nodes are symmetric, so 1 - s_j is node n-1-j.
  const auto exps = emap_many(betas, h, sector, opt);
  const ComplexMatrix kick = -beta * t_dir.matrix();
  const std::size_t n = g.nodes.size();
  ComplexMatrix sum = ComplexMatrix::Zero(h.dim(), h.dim());
  for (std::size_t j = 0; j < n; ++j) {
    sum += (0.5 * g.weights[j]) * (exps[j] * kick * exps[n - 1 - j]);
  }
  return sum;
}

double of_norm(const FormMatrix& t, const FormMatrix& h0) {
  if (t.dim() != h0.dim()) throw Error(ErrorCode::DimensionMismatch, "of_norm");
  if (!is_hermitian(h0.matrix())) {
    throw Error(ErrorCode::H0NotCoercive, "h0 is not hermitian");
  }
  if (lambda_min_hermitian(h0.matrix()) < 1.0 - 1e-12) {
    throw Error(ErrorCode::H0NotCoercive, "h0 has lambda_min < 1");
  }
  const ComplexMatrix h0_inv = inverse(h0.matrix());
  const auto [tr, ti] = hermitian_split(t);
  return spectral_norm(tr.matrix() * h0_inv) + spectral_norm(ti.matrix() * h0_inv);
}

}  // namespace sectorial
