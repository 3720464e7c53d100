#include "sectorial/eigenstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sectorial {

namespace {

Index largest_component(const ComplexVector& v) {
  Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  return k;
}

// Rotates phi and eta by a common phase so phi[pin] is real positive.
void fix_phase(RankOnePair& pair, std::optional<Index> pin, const Options& opt) {
  Index k = largest_component(pair.phi);
  pair.repinned = false;
  if (pin && *pin >= 0 && *pin < pair.phi.size()) {
    if (std::abs(pair.phi[*pin]) >= opt.repin_threshold) {
      k = *pin;
    } else {
      pair.repinned = true;
    }
  }
  const Complex phase = std::conj(pair.phi[k]) / std::abs(pair.phi[k]);
  pair.phi *= phase;
  pair.eta *= phase;
  pair.phi[k] = Complex(pair.phi[k].real(), 0.0);
  pair.pinned = k;
}

void normalise_eta(RankOnePair& pair) {
  const Complex s = pair.eta.dot(pair.phi);
  if (std::abs(s) == 0.0) {
    throw Error(ErrorCode::RankNotOne, "left and right vectors are orthogonal");
  }
  pair.eta /= std::conj(s);
}

struct Isolation {
  Index target = 0;
  double gap = std::numeric_limits<double>::infinity();
};

Isolation isolate(const ComplexVector& eigs, Complex center) {
  Isolation iso;
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < eigs.size(); ++k) {
    const double d = std::abs(eigs[k] - center);
    if (d < best) {
      best = d;
      iso.target = k;
    }
  }
  for (Index k = 0; k < eigs.size(); ++k) {
    if (k != iso.target) iso.gap = std::min(iso.gap, std::abs(eigs[k] - eigs[iso.target]));
  }
  return iso;
}

// Fewest trapezoid nodes (at least `base`) for which every eigenvalue keeps
// node_spacing_factor local spacings away from the circle.
int circle_nodes(const Circle& c, const ComplexVector& eigs, int base, const Options& opt) {
  double dmin = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < eigs.size(); ++k) {
    dmin = std::min(dmin, std::abs(std::abs(eigs[k] - c.center) - c.radius));
  }
  if (!(dmin > 0.0)) return base;
  const double need = opt.node_spacing_factor * 2.0 * kPi * c.radius / dmin;
  if (need > 4096.0) return base;  // validate_enclosure reports it
  int m = base;
  while (m < need) m *= 2;
  return m;
}

// phi and eta of the rank-one projection enclosed by `rule`, from P v and
// P* u for fixed random v, u: one factorisation per node and no inverse.
RankOnePair probed_pair(const ComplexMatrix& a, const QuadratureRule& rule,
                        std::optional<Index> pin, const Options& opt) {
  const Index n = a.rows();
  std::mt19937_64 rng(0x70be5eedULL);
  ComplexMatrix probes(n, 2);
  probes.col(0) = random_vector(n, rng);
  probes.col(1) = random_vector(n, rng);
  const double scale = std::max(1.0, norm1(a));
  const Complex two_pi_i(0.0, 2.0 * kPi);
  auto leaf = [&](std::size_t j) -> ComplexMatrix {
    const Complex zeta = rule.nodes[j];
    ComplexMatrix shifted = a;
    shifted.diagonal().array() -= zeta;
    Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
    const double piv = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(piv > opt.pivot_tolerance * scale)) {
      throw Error(ErrorCode::ContourThroughSpectrum, "quadrature node hits the spectrum");
    }
    ComplexMatrix out(n, 2);
    out.col(0) = (-rule.weights[j] / two_pi_i) * lu.solve(probes.col(0));
    // (A - zeta)^* y = u with P (A - zeta) = L U, so y = P^T L^{-*} U^{-*} u
    const auto& f = lu.matrixLU();
    ComplexVector y = f.triangularView<Eigen::Upper>().adjoint().solve(probes.col(1));
    y = f.triangularView<Eigen::UnitLower>().adjoint().solve(y);
    out.col(1) = (std::conj(rule.weights[j]) / two_pi_i) * (lu.permutationP().transpose() * y);
    return out;
  };
  const ComplexMatrix sums = pairwise_reduce<ComplexMatrix>(0, rule.size(), leaf, opt.threads);
  RankOnePair pair;
  const double nrm = sums.col(0).norm();
  if (!(nrm > 0.0)) throw Error(ErrorCode::EmptyEnclosure, "projection vanishes on probe");
  pair.phi = sums.col(0) / nrm;
  pair.eta = sums.col(1);
  normalise_eta(pair);
  fix_phase(pair, pin, opt);
  pair.e = pair.eta.dot(a * pair.phi);
  return pair;
}

}  // namespace

RankOnePair rank_one_decompose(const ComplexMatrix& p, std::optional<Index> pin,
                               const Options& opt) {
  if (rank_of_projection(p) != 1) {
    throw Error(ErrorCode::RankNotOne, "projection rank is not 1");
  }
  Index col = 0;
  p.colwise().norm().maxCoeff(&col);
  RankOnePair pair;
  pair.phi = p.col(col) / p.col(col).norm();
  pair.eta = p.adjoint() * pair.phi;
  normalise_eta(pair);
  fix_phase(pair, pin, opt);
  const double err = spectral_norm(pair.phi * pair.eta.adjoint() - p);
  if (err > opt.normalization_tolerance * std::max(1.0, spectral_norm(p))) {
    throw Error(ErrorCode::RankNotOne,
                "rank-one reconstruction error " + std::to_string(err));
  }
  return pair;
}

Circle isolating_circle(const ComplexMatrix& a, const Options& opt) {
  const SpectralData sd = eig_oracle(a, opt);
  Index low = 0;
  for (Index k = 1; k < sd.eigenvalues.size(); ++k) {
    if (sd.eigenvalues[k].real() < sd.eigenvalues[low].real()) low = k;
  }
  const Isolation iso = isolate(sd.eigenvalues, sd.eigenvalues[low]);
  if (!(iso.gap >= opt.gap_floor)) {
    throw Error(ErrorCode::IsolationLost, "lowest eigenvalue is not isolated");
  }
  Circle c;
  c.center = sd.eigenvalues[low];
  c.radius = std::isfinite(iso.gap)
                 ? opt.radius_factor * iso.gap
                 : std::max(1.0, std::abs(c.center));
  return c;
}

TrackResult track_eigenvalue(const FormFamily& fam, std::span<const double> path,
                             const Circle& c0, const Options& opt) {
  if (path.empty()) throw Error(ErrorCode::InvalidArgument, "empty path");
  if (!(c0.radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "circle radius must be > 0");
  TrackResult out;
  Complex center = c0.center;
  double radius = c0.radius;
  std::optional<Index> pin;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const ComplexMatrix h = fam(path[k]).matrix();
    const SpectralData sd = eig_oracle(h, opt);
    const Isolation iso = isolate(sd.eigenvalues, center);
    if (!(iso.gap >= opt.gap_floor)) {
      throw Error(ErrorCode::IsolationLost,
                  "gap " + std::to_string(iso.gap) + " at path index " + std::to_string(k));
    }
    Circle c{center, radius, c0.nodes};
    if (k > 0 && std::isfinite(iso.gap)) c.radius = std::min(radius, opt.radius_factor * iso.gap);
    c.nodes = circle_nodes(c, sd.eigenvalues, std::max(c0.nodes, 8), opt);
    const QuadratureRule rule = quadrature(c, opt);
    validate_enclosure(rule, sd.eigenvalues, opt.node_spacing_factor);
    int inside = 0;
    for (Index j = 0; j < sd.eigenvalues.size(); ++j) {
      if (std::abs(sd.eigenvalues[j] - c.center) < c.radius) ++inside;
    }
    if (inside == 0) {
      throw Error(ErrorCode::EmptyEnclosure,
                  "tracked eigenvalue left the circle at path index " + std::to_string(k));
    }
    if (inside > 1) {
      throw Error(ErrorCode::DegenerateEnclosure,
                  "circle holds " + std::to_string(inside) + " eigenvalues");
    }
    const RankOnePair pair = probed_pair(h, rule, pin, opt);
    pin = pair.pinned;
    out.points.push_back({static_cast<Index>(k), path[k], pair.e, iso.gap, c.radius,
                          pair.repinned});
    center = pair.e;
    radius = std::isfinite(iso.gap) ? std::min(c.radius, opt.radius_factor * iso.gap)
                                    : c.radius;
  }
  out.discrepancy = out.points.back().e - out.points.front().e;
  return out;
}

HellmannFeynman hellmann_feynman(const FormMatrix& h, const FormMatrix& dh, const Contour& c,
                                 const Options& opt) {
  if (h.dim() != dh.dim()) throw Error(ErrorCode::DimensionMismatch, "hellmann_feynman");
  const Enclosure enc = enclose(h.matrix(), c, opt);
  HellmannFeynman out;
  out.pair = rank_one_decompose(enc.projection, std::nullopt, opt);
  out.e = trace(enc.projected);
  out.pair.e = out.e;
  out.derivative = out.pair.eta.dot(dh.matrix() * out.pair.phi);
  const ComplexVector r = h.matrix().adjoint() * out.pair.eta - std::conj(out.e) * out.pair.eta;
  out.adjoint_residual = r.norm() / (std::max(1.0, norm1(h.matrix())) * out.pair.eta.norm());
  return out;
}

HellmannFeynman hellmann_feynman(const ManyBodySpace& space, const FieldConfig& x,
                                 const FieldConfig& w, const std::optional<Contour>& c,
                                 const Options& opt) {
  return hellmann_feynman(space, x, std::span(&w, 1), c, opt).front();
}

std::vector<HellmannFeynman> hellmann_feynman(const ManyBodySpace& space,
                                              const FieldConfig& x,
                                              std::span<const FieldConfig> ws,
                                              const std::optional<Contour>& c,
                                              const Options& opt) {
  const FormMatrix h = family(space, x);
  const Contour contour = c ? *c : Contour(isolating_circle(h.matrix(), opt));
  const Enclosure enc = enclose(h.matrix(), contour, opt);
  HellmannFeynman base;
  base.pair = rank_one_decompose(enc.projection, std::nullopt, opt);
  base.e = trace(enc.projected);
  base.pair.e = base.e;
  const ComplexVector r = h.matrix().adjoint() * base.pair.eta - std::conj(base.e) * base.pair.eta;
  base.adjoint_residual = r.norm() / (std::max(1.0, norm1(h.matrix())) * base.pair.eta.norm());
  std::vector<HellmannFeynman> out;
  out.reserve(ws.size());
  for (const FieldConfig& w : ws) {
    HellmannFeynman hf = base;
    hf.derivative = base.pair.eta.dot(family_derivative(space, x, w).matrix() * base.pair.phi);
    out.push_back(std::move(hf));
  }
  return out;
}

ChargeCurrent eigenstate_density(const ManyBodySpace& space, const FieldConfig& x,
                                 const std::optional<Contour>& c, const Options& opt) {
  const FormMatrix h = family(space, x);
  const Contour contour = c ? *c : Contour(isolating_circle(h.matrix(), opt));
  const ComplexMatrix p = riesz_projection(h.matrix(), contour, opt);
  const RankOnePair pair = rank_one_decompose(p, std::nullopt, opt);
  return charge_current_from_pair(space, pair.phi, pair.eta, x.a, opt.normalization_tolerance);
}

}  // namespace sectorial
