#include "sectorial/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sectorial {

namespace {

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

double segment_distance(Complex z, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  const double s = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + s * ab));
}

// Hermitian "imaginary part" (X - X*) / 2i.
ComplexMatrix imag_part(const ComplexMatrix& x) {
  return (x - x.adjoint()) * Complex(0.0, -0.5);
}

ComplexMatrix real_part(const ComplexMatrix& x) { return 0.5 * (x + x.adjoint()); }

double sector_angle(Complex p, double c) {
  return std::atan2(std::abs(p.imag()), p.real() - c);
}

double required_angle(const std::vector<Complex>& pts, double c) {
  double worst = 0.0;
  for (const Complex& p : pts) worst = std::max(worst, sector_angle(p, c));
  return worst;
}

}  // namespace

FormMatrix::FormMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "form matrix must be square");
  }
  if (!m_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "form matrix has non-finite entries");
  }
}

FormMatrix& FormMatrix::operator+=(const FormMatrix& o) {
  if (o.dim() != dim()) throw Error(ErrorCode::DimensionMismatch, "form sum");
  m_ += o.m_;
  return *this;
}

FormMatrix& FormMatrix::operator-=(const FormMatrix& o) {
  if (o.dim() != dim()) throw Error(ErrorCode::DimensionMismatch, "form difference");
  m_ -= o.m_;
  return *this;
}

FormMatrix& FormMatrix::operator*=(Complex c) {
  m_ *= c;
  return *this;
}

Sector::Sector(double v, double theta) : vertex(v), half_angle(theta) {
  if (!(theta >= 0.0 && theta < kPi / 2)) {
    throw Error(ErrorCode::InvalidArgument, "sector half-angle must lie in [0, pi/2)");
  }
}

bool Sector::contains(Complex z, double slack) const {
  return distance(z) <= slack;
}

double Sector::distance(Complex z) const {
  const Complex w = z - vertex;
  if (w == Complex(0.0) || std::abs(std::arg(w)) <= half_angle) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double sign : {1.0, -1.0}) {
    const Complex dir = std::polar(1.0, sign * half_angle);
    const Complex local = std::conj(dir) * w;
    const double d = local.real() <= 0.0 ? std::abs(w) : std::abs(local.imag());
    best = std::min(best, d);
  }
  return best;
}

double NumericalRangeBoundary::max_modulus() const {
  double m = 0.0;
  for (const Complex& p : points) m = std::max(m, std::abs(p));
  return m;
}

bool NumericalRangeBoundary::is_convex(double slack) const {
  const std::size_t m = points.size();
  if (m < 3) return true;
  const double scale = std::max(1.0, max_modulus());
  const double tol = slack * scale * scale;
  // Skip zero-length edges so repeated points do not hide a turn.
  std::vector<Complex> edges;
  for (std::size_t k = 0; k < m; ++k) {
    const Complex e = points[(k + 1) % m] - points[k];
    if (std::abs(e) > 0.0) edges.push_back(e);
  }
  bool has_pos = false;
  bool has_neg = false;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const double c = cross(edges[k], edges[(k + 1) % edges.size()]);
    if (c > tol) has_pos = true;
    if (c < -tol) has_neg = true;
  }
  return !(has_pos && has_neg);
}

std::vector<Complex> NumericalRangeBoundary::outer_polygon() const {
  const std::size_t m = angles.size();
  std::vector<Complex> verts;
  verts.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t j = (k + 1) % m;
    const double a1 = std::cos(angles[k]), b1 = std::sin(angles[k]);
    const double a2 = std::cos(angles[j]), b2 = std::sin(angles[j]);
    const double det = a1 * b2 - b1 * a2;
    const double x = (support[k] * b2 - b1 * support[j]) / det;
    const double y = (a1 * support[j] - support[k] * a2) / det;
    verts.emplace_back(x, y);
  }
  return verts;
}

double NumericalRangeBoundary::outer_distance(Complex z) const {
  bool inside = true;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    if ((std::polar(1.0, -angles[k]) * z).real() > support[k]) {
      inside = false;
      break;
    }
  }
  if (inside) return 0.0;
  const auto verts = outer_polygon();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < verts.size(); ++k) {
    best = std::min(best, segment_distance(z, verts[k], verts[(k + 1) % verts.size()]));
  }
  return best;
}

double NumericalRangeBoundary::inner_distance(Complex z) const {
  const std::size_t m = points.size();
  if (m == 0) return std::numeric_limits<double>::infinity();
  double best = std::abs(z - points[0]);
  double area = 0.0;
  bool inside = true;
  const double scale = std::max(1.0, max_modulus());
  for (std::size_t k = 0; k < m; ++k) {
    const Complex a = points[k];
    const Complex b = points[(k + 1) % m];
    best = std::min(best, segment_distance(z, a, b));
    area += cross(a, b);
    if (std::abs(b - a) > 0.0 && cross(b - a, z - a) < -1e-14 * scale * scale) {
      inside = false;
    }
  }
  if (inside && area > 1e-14 * scale * scale) return 0.0;
  return best;
}

std::pair<FormMatrix, FormMatrix> hermitian_split(const FormMatrix& t) {
  const ComplexMatrix& m = t.matrix();
  ComplexMatrix re = 0.5 * (m + m.adjoint());
  const ComplexMatrix diff = m - m.adjoint();
  // (X - X*) / 2i, written out so that i * T^i reproduces (X - X*) / 2 exactly.
  ComplexMatrix im(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      im(i, j) = {0.5 * diff(i, j).imag(), -0.5 * diff(i, j).real()};
    }
  }
  return {FormMatrix(std::move(re)), FormMatrix(std::move(im))};
}

FormMatrix adjoint_form(const FormMatrix& t) { return FormMatrix(t.matrix().adjoint()); }

NumericalRangeBoundary numerical_range(const FormMatrix& t, int nodes) {
  if (nodes < 8) {
    throw Error(ErrorCode::InvalidArgument, "numerical_range needs at least 8 nodes");
  }
  const ComplexMatrix& m = t.matrix();
  const ComplexMatrix ma = m.adjoint();
  NumericalRangeBoundary out;
  out.angles.reserve(static_cast<std::size_t>(nodes));
  out.points.reserve(static_cast<std::size_t>(nodes));
  out.support.reserve(static_cast<std::size_t>(nodes));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es;
  for (int k = 0; k < nodes; ++k) {
    const double phi = 2.0 * kPi * k / nodes;
    const Complex rot = std::polar(1.0, -phi);
    const ComplexMatrix h = 0.5 * (rot * m + std::conj(rot) * ma);
    es.compute(h);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorCode::NoConvergence, "numerical range sweep eigen step failed");
    }
    const Index top = h.rows() - 1;
    const ComplexVector v = es.eigenvectors().col(top);
    out.angles.push_back(phi);
    out.points.push_back(t.quadratic(v) / v.squaredNorm());
    out.support.push_back(es.eigenvalues()(top));
  }
  return out;
}

Sector fit_sector(const NumericalRangeBoundary& b, double margin) {
  if (b.points.empty()) {
    throw Error(ErrorCode::InvalidArgument, "fit_sector: empty boundary");
  }
  double min_re = std::numeric_limits<double>::infinity();
  double max_re = -std::numeric_limits<double>::infinity();
  for (const Complex& p : b.points) {
    min_re = std::min(min_re, p.real());
    max_re = std::max(max_re, p.real());
  }
  const double spread = max_re - min_re;
  double lo = min_re - spread;
  double hi = min_re;

  // The objective is non-decreasing in the vertex; near-ties move right so
  // that ranges on the real axis keep their vertex at min Re.
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  const double tie = 1e-12;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = required_angle(b.points, x1);
  double f2 = required_angle(b.points, x2);
  double best_c = hi;
  double best_f = required_angle(b.points, hi);
  auto consider = [&](double c, double f) {
    if (f < best_f - tie || (std::abs(f - best_f) <= tie && c > best_c)) {
      best_c = c;
      best_f = f;
    }
  };
  consider(lo, required_angle(b.points, lo));
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(hi)); ++it) {
    consider(x1, f1);
    consider(x2, f2);
    if (f1 < f2 - tie) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = required_angle(b.points, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = required_angle(b.points, x2);
    }
  }
  consider(x1, f1);
  consider(x2, f2);

  if (best_f >= kPi / 2 - margin) {
    throw Error(ErrorCode::NotSectorial,
                "required half-angle " + std::to_string(best_f) +
                    " leaves no room for margin " + std::to_string(margin));
  }
  return Sector(best_c, best_f + margin);
}

bool range_in_sector(const FormMatrix& t, const Sector& s, double tol) {
  const ComplexMatrix& m = t.matrix();
  const Index n = m.rows();
  const double scale = std::max(1.0, norm1(m));
  const ComplexMatrix shifted = m - s.vertex * ComplexMatrix::Identity(n, n);
  if (lambda_min_hermitian(real_part(shifted)) < -tol * scale) return false;
  const Complex up = std::polar(1.0, -s.half_angle);
  if (lambda_max_hermitian(imag_part(up * shifted)) > tol * scale) return false;
  const Complex down = std::polar(1.0, s.half_angle);
  if (lambda_min_hermitian(imag_part(down * shifted)) < -tol * scale) return false;
  return true;
}

double tightest_vertex(const FormMatrix& t, double half_angle) {
  if (!(half_angle > 0.0 && half_angle < kPi / 2)) {
    throw Error(ErrorCode::InvalidArgument, "tightest_vertex: half-angle out of range");
  }
  const ComplexMatrix& m = t.matrix();
  const double sn = std::sin(half_angle);
  const double upper =
      -lambda_max_hermitian(imag_part(std::polar(1.0, -half_angle) * m)) / sn;
  const double lower =
      lambda_min_hermitian(imag_part(std::polar(1.0, half_angle) * m)) / sn;
  const double left = lambda_min_hermitian(real_part(m));
  return std::min({upper, lower, left});
}

}  // namespace sectorial
