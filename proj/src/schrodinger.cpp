#include "sectorial/schrodinger.hpp"

#include <cmath>

namespace sectorial {

Grid::Grid(int d_, int n_, double delta_) : d(d_), n(n_), delta(delta_) {
  if (d != 1 && d != 2) throw Error(ErrorCode::InvalidArgument, "grid dimension must be 1 or 2");
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "grid needs n >= 3");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid spacing must be > 0");
}

Index Grid::sites() const { return d == 1 ? Index(n) : Index(n) * n; }

std::array<int, 2> Grid::coords(Index s) const {
  return {static_cast<int>(s % n), d == 2 ? static_cast<int>(s / n) : 0};
}

Index Grid::site(std::array<int, 2> c) const {
  const int x0 = ((c[0] % n) + n) % n;
  if (d == 1) return x0;
  const int x1 = ((c[1] % n) + n) % n;
  return x0 + Index(n) * x1;
}

Index Grid::neighbor(Index s, int mu) const {
  auto c = coords(s);
  c[static_cast<std::size_t>(mu)] += 1;
  return site(c);
}

double Grid::cell_volume() const { return std::pow(delta, d); }

Index Grid::displacement(Index a, Index b) const {
  const auto ca = coords(a);
  const auto cb = coords(b);
  return site({ca[0] - cb[0], ca[1] - cb[1]});
}

std::array<int, 2> Grid::minimal_displacement(Index disp) const {
  auto c = coords(disp);
  for (int k = 0; k < d; ++k) {
    int& x = c[static_cast<std::size_t>(k)];
    if (2 * x > n) x -= n;  // x == n/2 stays positive
  }
  return c;
}

ManyBodySpace::ManyBodySpace(Grid grid, int particles)
    : grid_(grid), particles_(particles), dim_(1) {
  if (particles < 1 || particles > 3) {
    throw Error(ErrorCode::InvalidArgument, "particle number must be 1, 2 or 3");
  }
  const Index s = grid_.sites();
  stride_.assign(static_cast<std::size_t>(particles), 1);
  for (int p = particles - 1; p >= 0; --p) {
    stride_[static_cast<std::size_t>(p)] = dim_;
    if (dim_ > kMaxDim / s) {
      throw Error(ErrorCode::InvalidArgument, "configuration space exceeds 2048 states");
    }
    dim_ *= s;
  }
}

Index ManyBodySpace::encode(const std::vector<Index>& sites) const {
  if (sites.size() != static_cast<std::size_t>(particles_)) {
    throw Error(ErrorCode::DimensionMismatch, "encode: wrong particle count");
  }
  Index flat = 0;
  for (std::size_t p = 0; p < sites.size(); ++p) {
    if (sites[p] < 0 || sites[p] >= grid_.sites()) {
      throw Error(ErrorCode::InvalidArgument, "encode: site out of range");
    }
    flat += sites[p] * stride_[p];
  }
  return flat;
}

std::vector<Index> ManyBodySpace::decode(Index flat) const {
  std::vector<Index> out(static_cast<std::size_t>(particles_));
  for (int p = 0; p < particles_; ++p) out[static_cast<std::size_t>(p)] = site_of(flat, p);
  return out;
}

Index ManyBodySpace::site_of(Index flat, int particle) const {
  return (flat / stride_[static_cast<std::size_t>(particle)]) % grid_.sites();
}

Index ManyBodySpace::with_site(Index flat, int particle, Index site) const {
  const Index st = stride_[static_cast<std::size_t>(particle)];
  return flat + (site - site_of(flat, particle)) * st;
}

FieldConfig FieldConfig::zeros(const Grid& g) {
  FieldConfig x;
  x.u = ComplexVector::Zero(g.sites());
  x.a = ComplexVector::Zero(g.links());
  x.v = ComplexVector::Zero(g.sites());
  x.f = ComplexVector::Zero(g.sites());
  x.u0 = RealVector::Zero(g.sites());
  x.v0 = RealVector::Zero(g.sites());
  return x;
}

void FieldConfig::validate(const Grid& g) const {
  if (u.size() != g.sites() || f.size() != g.sites() || u0.size() != g.sites()) {
    throw Error(ErrorCode::InvalidField, "site fields must have one value per site");
  }
  if (a.size() != g.links()) {
    throw Error(ErrorCode::InvalidField, "A must have one value per directed link");
  }
  if (v.size() != g.sites() || v0.size() != g.sites()) {
    throw Error(ErrorCode::InvalidField, "kernels need one value per displacement");
  }
  if ((u0.array() < 0.0).any() || (v0.array() < 0.0).any()) {
    throw Error(ErrorCode::InvalidField, "backgrounds u0, v0 must be non-negative");
  }
  if (!u.allFinite() || !a.allFinite() || !v.allFinite() || !f.allFinite() ||
      !u0.allFinite() || !v0.allFinite()) {
    throw Error(ErrorCode::InvalidField, "fields must be finite");
  }
}

FieldConfig FieldConfig::displaced(const FieldConfig& w, Complex zeta) const {
  FieldConfig out = *this;
  out.u += zeta * w.u;
  out.a += zeta * w.a;
  out.v += zeta * w.v;
  out.f += zeta * w.f;
  return out;
}

namespace {

// Adds the link blocks of k_A (or of its derivative) to m. For every
// configuration and particle, the link from the particle's site to its +mu
// neighbour contributes
//   conj(phi_h p + phi_t q) (a psi_h + b psi_t)
// with p = 1/delta + iA/2, q = -1/delta + iA/2, a = 1/delta - iA/2,
// b = -1/delta - iA/2.
template <class Coeffs>
ComplexMatrix assemble_links(const ManyBodySpace& space, Coeffs coeffs) {
  const Grid& g = space.grid();
  const Index n = space.dim();
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Index t = 0; t < n; ++t) {
    for (int alpha = 0; alpha < space.particles(); ++alpha) {
      const Index s = space.site_of(t, alpha);
      for (int mu = 0; mu < g.d; ++mu) {
        const Index link = s * g.d + mu;
        const Index h = space.with_site(t, alpha, g.neighbor(s, mu));
        const auto [hh, ht, th, tt] = coeffs(link);
        m(h, h) += hh;
        m(h, t) += ht;
        m(t, h) += th;
        m(t, t) += tt;
      }
    }
  }
  return m;
}

struct LinkBlock {
  Complex hh, ht, th, tt;
};

}  // namespace

FormMatrix kinetic_form(const ManyBodySpace& space, const ComplexVector& a) {
  const Grid& g = space.grid();
  if (a.size() != g.links()) {
    throw Error(ErrorCode::DimensionMismatch, "A must have one value per directed link");
  }
  const double inv = 1.0 / g.delta;
  return FormMatrix(assemble_links(space, [&](Index link) {
    const Complex half = 0.5 * kI * a[link];
    const Complex p = inv + half, q = -inv + half;
    const Complex ca = inv - half, cb = -inv - half;
    return LinkBlock{p * ca, p * cb, q * ca, q * cb};
  }));
}

FormMatrix kinetic_derivative(const ManyBodySpace& space, const ComplexVector& a,
                              const ComplexVector& da) {
  const Grid& g = space.grid();
  if (a.size() != g.links() || da.size() != g.links()) {
    throw Error(ErrorCode::DimensionMismatch, "A must have one value per directed link");
  }
  const double inv = 1.0 / g.delta;
  return FormMatrix(assemble_links(space, [&](Index link) {
    const Complex half = 0.5 * kI * a[link];
    const Complex p = inv + half, q = -inv + half;
    const Complex ca = inv - half, cb = -inv - half;
    const Complex dp = 0.5 * kI * da[link];  // dq = dp, da = db = -dp
    return LinkBlock{dp * ca - p * dp, dp * cb - p * dp, dp * ca - q * dp, dp * cb - q * dp};
  }));
}

FormMatrix potential_form(const ManyBodySpace& space, const ComplexVector& w,
                          bool per_particle) {
  const Index n = space.dim();
  ComplexVector diag = ComplexVector::Zero(n);
  if (per_particle) {
    if (w.size() != space.grid().sites()) {
      throw Error(ErrorCode::DimensionMismatch, "potential needs one value per site");
    }
    for (Index x = 0; x < n; ++x) {
      for (int alpha = 0; alpha < space.particles(); ++alpha) {
        diag[x] += w[space.site_of(x, alpha)];
      }
    }
  } else {
    if (w.size() != n) {
      throw Error(ErrorCode::DimensionMismatch,
                  "configuration potential needs one value per state");
    }
    diag = w;
  }
  return FormMatrix(diag.asDiagonal());
}

FormMatrix interaction_form(const ManyBodySpace& space, const ComplexVector& v) {
  const Grid& g = space.grid();
  if (v.size() != g.sites()) {
    throw Error(ErrorCode::DimensionMismatch, "kernel needs one value per displacement");
  }
  const Index n = space.dim();
  ComplexVector diag = ComplexVector::Zero(n);
  for (Index x = 0; x < n; ++x) {
    for (int a = 0; a < space.particles(); ++a) {
      for (int b = 0; b < space.particles(); ++b) {
        if (a == b) continue;
        diag[x] += 0.5 * v[g.displacement(space.site_of(x, a), space.site_of(x, b))];
      }
    }
  }
  return FormMatrix(diag.asDiagonal());
}

FormMatrix family(const ManyBodySpace& space, const FieldConfig& x) {
  x.validate(space.grid());
  if (x.f.size() > 0 && x.f.cwiseAbs().maxCoeff() >= 1.0) {
    throw Error(ErrorCode::ModulationTooLarge, "||f||_inf must be < 1");
  }
  const ComplexVector u0c = x.u0.cast<Complex>();
  const ComplexVector onebody = u0c + x.u + x.f.cwiseProduct(u0c);
  const ComplexVector twobody = x.v0.cast<Complex>() + x.v;
  FormMatrix h = kinetic_form(space, x.a);
  h += potential_form(space, onebody);
  if (space.particles() > 1) h += interaction_form(space, twobody);
  return h;
}

FormMatrix family_derivative(const ManyBodySpace& space, const FieldConfig& x,
                             const FieldConfig& w) {
  x.validate(space.grid());
  const ComplexVector u0c = x.u0.cast<Complex>();
  FormMatrix d = kinetic_derivative(space, x.a, w.a);
  d += potential_form(space, w.u + w.f.cwiseProduct(u0c));
  if (space.particles() > 1) d += interaction_form(space, w.v);
  return d;
}

ChargeCurrent charge_current_from_pair(const ManyBodySpace& space, const ComplexVector& phi,
                                       const ComplexVector& eta, const ComplexVector& a,
                                       double tol) {
  const Grid& g = space.grid();
  const Index n = space.dim();
  if (phi.size() != n || eta.size() != n || a.size() != g.links()) {
    throw Error(ErrorCode::DimensionMismatch, "charge_current_from_pair");
  }
  const Complex overlap = eta.dot(phi);
  if (std::abs(overlap - 1.0) > tol) {
    throw Error(ErrorCode::NotNormalizedPair,
                "<eta, phi> = (" + std::to_string(overlap.real()) + ", " +
                    std::to_string(overlap.imag()) + ")");
  }
  const double vol = g.cell_volume();
  const double inv = 1.0 / g.delta;
  ChargeCurrent out;
  out.rho = ComplexVector::Zero(g.sites());
  out.j = ComplexVector::Zero(g.links());
  for (Index t = 0; t < n; ++t) {
    const Complex eta_t = std::conj(eta[t]);
    for (int alpha = 0; alpha < space.particles(); ++alpha) {
      const Index s = space.site_of(t, alpha);
      out.rho[s] += eta_t * phi[t];
      for (int mu = 0; mu < g.d; ++mu) {
        const Index link = s * g.d + mu;
        const Index h = space.with_site(t, alpha, g.neighbor(s, mu));
        const Complex eta_h = std::conj(eta[h]);
        const Complex m_eta = 0.5 * (eta_h + eta_t);
        const Complex g_eta = (eta_h - eta_t) * inv;
        const Complex m_phi = 0.5 * (phi[h] + phi[t]);
        const Complex g_phi = (phi[h] - phi[t]) * inv;
        out.j[link] += kI * (m_eta * g_phi - g_eta * m_phi) + 2.0 * a[link] * m_eta * m_phi;
      }
    }
  }
  out.rho /= Complex(vol);
  out.j /= Complex(vol);
  return out;
}

}  // namespace sectorial
