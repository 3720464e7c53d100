#include "sectorial/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sectorial {

namespace {

constexpr Complex kTwoPiI{0.0, 2.0 * kPi};
constexpr std::size_t kMaxNodes = 400000;

double segment_distance(Complex z, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  const double s = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + s * ab));
}

void append_panel(QuadratureRule& rule, const GaussRule& g, Complex a, Complex b) {
  const Complex mid = 0.5 * (a + b);
  const Complex half = 0.5 * (b - a);
  const double spacing = std::abs(b - a) / static_cast<double>(g.nodes.size());
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    rule.nodes.push_back(mid + half * g.nodes[k]);
    rule.weights.push_back(half * g.weights[k]);
    rule.spacing.push_back(spacing);
  }
  if (rule.nodes.size() > kMaxNodes) {
    throw Error(ErrorCode::ContourThroughSpectrum,
                "contour needs more than " + std::to_string(kMaxNodes) + " nodes");
  }
}

void append_edge(QuadratureRule& rule, const GaussRule& g, Complex a, Complex b,
                 double max_panel) {
  const double len = std::abs(b - a);
  std::size_t panels = 1;
  if (max_panel > 0.0) panels = std::max<std::size_t>(1, std::ceil(len / max_panel));
  for (std::size_t p = 0; p < panels; ++p) {
    const double s0 = static_cast<double>(p) / panels;
    const double s1 = static_cast<double>(p + 1) / panels;
    append_panel(rule, g, a + s0 * (b - a), a + s1 * (b - a));
  }
}

QuadratureRule circle_rule(const Circle& c) {
  if (!(c.radius > 0.0) || c.nodes < 3) {
    throw Error(ErrorCode::InvalidArgument, "circle needs radius > 0 and >= 3 nodes");
  }
  QuadratureRule rule;
  const double dtheta = 2.0 * kPi / c.nodes;
  for (int j = 0; j < c.nodes; ++j) {
    const Complex e = std::polar(1.0, j * dtheta);
    rule.nodes.push_back(c.center + c.radius * e);
    rule.weights.push_back(kI * c.radius * e * dtheta);
    rule.spacing.push_back(c.radius * dtheta);
  }
  return rule;
}

QuadratureRule polygon_rule(const std::vector<Complex>& verts, int order, double max_panel) {
  if (verts.size() < 3) {
    throw Error(ErrorCode::InvalidArgument, "closed polyline needs >= 3 vertices");
  }
  const GaussRule g = gauss_legendre(order);
  QuadratureRule rule;
  for (std::size_t k = 0; k < verts.size(); ++k) {
    append_edge(rule, g, verts[k], verts[(k + 1) % verts.size()], max_panel);
  }
  return rule;
}

double polygon_distance(const std::vector<Complex>& verts, Complex z) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < verts.size(); ++k) {
    d = std::min(d, segment_distance(z, verts[k], verts[(k + 1) % verts.size()]));
  }
  return d;
}

QuadratureRule right_boundary_rule(const RightBoundary& rb, const Options& opt,
                                   const ComplexVector* eigenvalues) {
  const auto verts = right_boundary_polygon(rb, opt);
  if (verts.empty()) {
    throw Error(ErrorCode::InvalidArgument, "right boundary lies left of its sector");
  }
  double max_panel = rb.max_panel;
  if (max_panel <= 0.0) {
    if (eigenvalues == nullptr) {
      throw Error(ErrorCode::InvalidArgument,
                  "automatic right-boundary panels need the spectrum");
    }
    double d = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < eigenvalues->size(); ++k) {
      d = std::min(d, polygon_distance(verts, (*eigenvalues)[k]));
    }
    if (!(d > 0.0)) throw Error(ErrorCode::GammaHitsSpectrum, "eigenvalue on the contour");
    max_panel = 0.9 * d * rb.order / opt.node_spacing_factor;
  }
  return polygon_rule(verts, rb.order, max_panel);
}

QuadratureRule sector_rule(const SectorBoundary& sb, const Options& opt) {
  if (!(sb.half_angle > 0.0 && sb.half_angle < kPi / 2) || !(sb.radius > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sector boundary geometry out of range");
  }
  const GaussRule g = gauss_legendre(sb.order);
  const Complex up = std::polar(1.0, sb.half_angle);
  const Complex down = std::conj(up);

  std::vector<double> breaks{0.0};
  if (sb.keep_out) {
    // Distance to the keep-out wedge is 1-Lipschitz along the ray, so a panel
    // of length h starting at distance d stays at least d - h away.
    const double g_ratio = sb.order / opt.node_spacing_factor;
    while (breaks.back() < sb.radius) {
      const double r = breaks.back();
      const double d = std::min(sb.keep_out->distance(sb.vertex + r * up),
                                sb.keep_out->distance(sb.vertex + r * down));
      if (!(d > 0.0)) {
        throw Error(ErrorCode::ContourThroughSpectrum,
                    "sector boundary touches the keep-out wedge");
      }
      const double h = 0.9 * g_ratio * d / (1.0 + g_ratio);
      breaks.push_back(std::min(sb.radius, r + h));
      if (breaks.size() * static_cast<std::size_t>(sb.order) > kMaxNodes) {
        throw Error(ErrorCode::ContourThroughSpectrum, "sector boundary too fine");
      }
    }
  } else {
    const int panels = std::max(1, sb.panels_per_ray);
    for (int p = 1; p <= panels; ++p) breaks.push_back(sb.radius * p / panels);
  }

  QuadratureRule rule;
  rule.closed = false;
  // Upper ray inward, then lower ray outward.
  for (std::size_t p = breaks.size() - 1; p > 0; --p) {
    append_panel(rule, g, sb.vertex + breaks[p] * up, sb.vertex + breaks[p - 1] * up);
  }
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    append_panel(rule, g, sb.vertex + breaks[p] * down, sb.vertex + breaks[p + 1] * down);
  }
  return rule;
}

struct MatrixPack {
  std::vector<ComplexMatrix> items;
  MatrixPack& operator+=(const MatrixPack& o) {
    for (std::size_t k = 0; k < items.size(); ++k) items[k] += o.items[k];
    return *this;
  }
};

}  // namespace

GaussRule gauss_legendre(int order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "Gauss order must be >= 1");
  GaussRule g;
  g.nodes.resize(static_cast<std::size_t>(order));
  g.weights.resize(static_cast<std::size_t>(order));
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[static_cast<std::size_t>(i)] = -x;
    g.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    g.weights[static_cast<std::size_t>(i)] = w;
    g.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) g.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return g;
}

std::vector<Complex> right_boundary_polygon(const RightBoundary& rb, const Options& opt) {
  const double vertex = rb.sector.vertex - opt.sector_delta;
  if (rb.gamma <= vertex) return {};
  const double theta = 0.5 * (rb.sector.half_angle + kPi / 2);
  const double h = (rb.gamma - vertex) * std::tan(theta);
  return {Complex(rb.gamma, -h), Complex(rb.gamma, h), Complex(vertex, 0.0)};
}

QuadratureRule quadrature(const Contour& c, const Options& opt,
                          const ComplexVector* eigenvalues) {
  return std::visit(
      [&](const auto& v) -> QuadratureRule {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return circle_rule(v);
        } else if constexpr (std::is_same_v<T, Polyline>) {
          return polygon_rule(v.vertices, v.order, v.max_panel);
        } else if constexpr (std::is_same_v<T, RightBoundary>) {
          return right_boundary_rule(v, opt, eigenvalues);
        } else {
          return sector_rule(v, opt);
        }
      },
      c);
}

SelfTest self_test(const QuadratureRule& rule, Complex z0) {
  Complex closure = 0.0;
  Complex winding = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    closure += rule.weights[j];
    winding += rule.weights[j] / (rule.nodes[j] - z0);
  }
  return {std::abs(closure), std::abs(winding - kTwoPiI)};
}

int winding_number(const QuadratureRule& rule, Complex z) {
  Complex s = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) s += rule.weights[j] / (rule.nodes[j] - z);
  return static_cast<int>(std::lround((s / kTwoPiI).real()));
}

void validate_enclosure(const QuadratureRule& rule, const ComplexVector& eigenvalues,
                        double factor) {
  for (Index k = 0; k < eigenvalues.size(); ++k) {
    for (std::size_t j = 0; j < rule.size(); ++j) {
      if (std::abs(rule.nodes[j] - eigenvalues[k]) < factor * rule.spacing[j]) {
        throw Error(ErrorCode::ContourThroughSpectrum,
                    "eigenvalue (" + std::to_string(eigenvalues[k].real()) + ", " +
                        std::to_string(eigenvalues[k].imag()) +
                        ") is too close to the contour");
      }
    }
  }
}

std::vector<ComplexMatrix> contour_integrals(const ComplexMatrix& a,
                                             const QuadratureRule& rule,
                                             std::span<const ScalarFunction> fs,
                                             const Options& opt) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "contour_integrals");
  if (rule.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty quadrature rule");
  const Index n = a.rows();
  const auto leaf = [&](std::size_t j) {
    const Complex zeta = rule.nodes[j];
    ComplexMatrix res;
    try {
      res = inverse(a - zeta * ComplexMatrix::Identity(n, n), opt);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SingularMatrix) {
        throw Error(ErrorCode::ContourThroughSpectrum, "quadrature node hits the spectrum");
      }
      throw;
    }
    const Complex scale = -rule.weights[j] / kTwoPiI;
    MatrixPack pack;
    pack.items.reserve(fs.size());
    for (const auto& f : fs) pack.items.push_back((scale * f(zeta)) * res);
    return pack;
  };
  return pairwise_reduce<MatrixPack>(0, rule.size(), leaf, opt.threads).items;
}

namespace {

QuadratureRule checked_rule(const ComplexMatrix& a, const Contour& c, const Options& opt) {
  const SpectralData sd = eig_oracle(a, opt);
  QuadratureRule rule = quadrature(c, opt, &sd.eigenvalues);
  validate_enclosure(rule, sd.eigenvalues, opt.node_spacing_factor);
  return rule;
}

}  // namespace

Enclosure enclose(const ComplexMatrix& a, const Contour& c, const Options& opt) {
  const QuadratureRule rule = checked_rule(a, c, opt);
  const ScalarFunction fs[] = {[](Complex) { return Complex(1.0); },
                               [](Complex z) { return z; }};
  auto out = contour_integrals(a, rule, fs, opt);
  return {std::move(out[0]), std::move(out[1])};
}

ComplexMatrix riesz_projection(const ComplexMatrix& a, const Contour& c, const Options& opt) {
  return rdt_function(a, c, [](Complex) { return Complex(1.0); }, opt);
}

ComplexMatrix projected_operator(const ComplexMatrix& a, const Contour& c,
                                 const Options& opt) {
  return rdt_function(a, c, [](Complex z) { return z; }, opt);
}

ComplexMatrix rdt_function(const ComplexMatrix& a, const Contour& c, const ScalarFunction& f,
                           const Options& opt) {
  const QuadratureRule rule = checked_rule(a, c, opt);
  return std::move(contour_integrals(a, rule, std::span(&f, 1), opt).front());
}

Complex extract_eigenvalue(const ComplexMatrix& a, const Contour& c, const Options& opt) {
  const Enclosure e = enclose(a, c, opt);
  const Complex tr = trace(e.projection);
  if (std::abs(tr) < 0.5) {
    throw Error(ErrorCode::EmptyEnclosure, "contour encloses no eigenvalue");
  }
  if (std::abs(tr - 1.0) > opt.enclosure_trace_tolerance) {
    throw Error(ErrorCode::DegenerateEnclosure,
                "projection trace " + std::to_string(tr.real()) + " is not 1");
  }
  return trace(e.projected);
}

int rank_of_projection(const ComplexMatrix& p) {
  if (p.rows() != p.cols()) throw Error(ErrorCode::DimensionMismatch, "rank_of_projection");
  const double pn = spectral_norm(p);
  const double idem = spectral_norm(p * p - p);
  if (idem > 1e-6 * std::max(1.0, pn * pn)) {
    throw Error(ErrorCode::NotAProjection,
                "||P^2 - P|| = " + std::to_string(idem));
  }
  const int rank = static_cast<int>(std::lround(trace(p).real()));
  const RealVector sv = singular_values(p);
  const int count = static_cast<int>((sv.array() > 0.5).count());
  if (count != rank) {
    throw Error(ErrorCode::NotAProjection, "trace and singular-value ranks disagree");
  }
  return rank;
}

LowEnergyPart low_energy_hamiltonian(const ComplexMatrix& a, const RightBoundary& gamma,
                                     const Options& opt) {
  const Index n = a.rows();
  const auto verts = right_boundary_polygon(gamma, opt);
  const SpectralData sd = eig_oracle(a, opt);
  if (verts.empty()) {
    for (Index k = 0; k < n; ++k) {
      if (sd.eigenvalues[k].real() < gamma.gamma) {
        throw Error(ErrorCode::ContourThroughSpectrum,
                    "spectrum extends left of the completion sector");
      }
    }
    return {ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n)};
  }
  const double scale = std::max(1.0, norm1(a));
  for (Index k = 0; k < n; ++k) {
    const Complex lam = sd.eigenvalues[k];
    if (segment_distance(lam, verts[0], verts[1]) <= 1e-12 * scale) {
      throw Error(ErrorCode::GammaHitsSpectrum, "Re = gamma meets the spectrum");
    }
  }
  const QuadratureRule rule = quadrature(gamma, opt, &sd.eigenvalues);
  for (Index k = 0; k < n; ++k) {
    const Complex lam = sd.eigenvalues[k];
    if (lam.real() < gamma.gamma && winding_number(rule, lam) != 1) {
      throw Error(ErrorCode::ContourThroughSpectrum,
                  "completion does not enclose all spectrum left of gamma");
    }
  }
  validate_enclosure(rule, sd.eigenvalues, opt.node_spacing_factor);
  const ScalarFunction fs[] = {[](Complex) { return Complex(1.0); },
                               [](Complex z) { return z; }};
  auto out = contour_integrals(a, rule, fs, opt);
  return {std::move(out[0]), std::move(out[1])};
}

}  // namespace sectorial
