#include "sectorial/holocheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sectorial/error.hpp"

namespace sectorial {

std::vector<Probe> make_probes(Index n, int count, std::uint64_t seed) {
  if (n < 1 || count < 1) throw Error(ErrorCode::InvalidArgument, "make_probes");
  std::mt19937_64 rng(seed);
  std::vector<Probe> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Probe p;
    p.a = random_unit_vector(n, rng);
    p.b = random_unit_vector(n, rng);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Complex> circle_points(double r, int m) {
  if (!(r > 0.0) || m < 1) throw Error(ErrorCode::InvalidArgument, "circle needs r > 0, m >= 1");
  std::vector<Complex> z(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) z[static_cast<std::size_t>(j)] = std::polar(r, 2.0 * kPi * j / m);
  return z;
}

Residual cauchy_residual(const std::vector<Complex>& values, double r) {
  const int m = static_cast<int>(values.size());
  const auto z = circle_points(r, m);
  const double dtheta = 2.0 * kPi / m;
  double peak = 0.0;
  auto leaf = [&](std::size_t j) {
    peak = std::max(peak, std::abs(values[j]));
    return values[j] * (kI * z[j] * dtheta);
  };
  Residual res;
  res.absolute = std::abs(pairwise_reduce<Complex>(0, values.size(), leaf));
  res.relative = peak > 0.0 ? res.absolute / (2.0 * kPi * r * peak) : 0.0;
  return res;
}

Residual cauchy_residual(const ScalarSlice& g, double r, int m) {
  const auto z = circle_points(r, m);
  std::vector<Complex> v(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    v[j] = g(z[j]);
    if (!std::isfinite(v[j].real()) || !std::isfinite(v[j].imag())) {
      throw Error(ErrorCode::EvaluationFailure, "slice is not finite on the circle");
    }
  }
  return cauchy_residual(v, r);
}

Residual cauchy_residual(const MatrixSlice& f, double r, int m,
                         const std::vector<Probe>& probes) {
  const auto z = circle_points(r, m);
  std::vector<std::vector<Complex>> v(probes.size(), std::vector<Complex>(z.size()));
  for (std::size_t j = 0; j < z.size(); ++j) {
    const ComplexMatrix fm = f(z[j]);
    if (!fm.allFinite()) {
      throw Error(ErrorCode::EvaluationFailure, "slice is not finite on the circle");
    }
    for (std::size_t p = 0; p < probes.size(); ++p) v[p][j] = probes[p](fm);
  }
  Residual worst;
  for (const auto& vals : v) {
    const Residual res = cauchy_residual(vals, r);
    if (res.relative >= worst.relative) worst = res;
  }
  return worst;
}

namespace {

void check_taylor_args(double r, int m, int k_max) {
  if (k_max < 0) throw Error(ErrorCode::InvalidArgument, "k_max must be >= 0");
  if (m < 4 * k_max || m < 1) throw Error(ErrorCode::InvalidArgument, "need m >= 4 k_max");
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be > 0");
}

}  // namespace

std::vector<Complex> taylor_coefficients(const std::vector<Complex>& values, double r,
                                         int k_max) {
  const int m = static_cast<int>(values.size());
  check_taylor_args(r, m, k_max);
  std::vector<Complex> c(static_cast<std::size_t>(k_max + 1));
  for (int k = 0; k <= k_max; ++k) {
    auto leaf = [&](std::size_t j) {
      return values[j] * std::polar(1.0, -2.0 * kPi * static_cast<double>(k) *
                                              static_cast<double>(j) / m);
    };
    c[static_cast<std::size_t>(k)] =
        pairwise_reduce<Complex>(0, values.size(), leaf) / (m * std::pow(r, k));
  }
  return c;
}

std::vector<Complex> taylor_coefficients(const ScalarSlice& g, double r, int m, int k_max) {
  check_taylor_args(r, m, k_max);
  const auto z = circle_points(r, m);
  std::vector<Complex> v(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) v[j] = g(z[j]);
  return taylor_coefficients(v, r, k_max);
}

std::vector<ComplexMatrix> taylor_coefficients(const MatrixSlice& f, double r, int m,
                                               int k_max) {
  check_taylor_args(r, m, k_max);
  const auto z = circle_points(r, m);
  std::vector<ComplexMatrix> v;
  v.reserve(z.size());
  for (const Complex& zj : z) v.push_back(f(zj));
  std::vector<ComplexMatrix> c;
  c.reserve(static_cast<std::size_t>(k_max + 1));
  for (int k = 0; k <= k_max; ++k) {
    auto leaf = [&](std::size_t j) -> ComplexMatrix {
      return v[j] * std::polar(1.0, -2.0 * kPi * static_cast<double>(k) *
                                         static_cast<double>(j) / m);
    };
    c.push_back(pairwise_reduce<ComplexMatrix>(0, v.size(), leaf) /
                Complex(m * std::pow(r, k)));
  }
  return c;
}

double radius_estimate(const std::vector<Complex>& coeffs) {
  const auto nonzero = std::count_if(coeffs.begin(), coeffs.end(),
                                     [](const Complex& c) { return std::abs(c) > 0.0; });
  if (nonzero < 5) throw Error(ErrorCode::NotEnoughTerms, "need >= 5 nonzero coefficients");
  double peak = 0.0;
  for (const Complex& c : coeffs) peak = std::max(peak, std::abs(c));
  const std::size_t last = coeffs.size() - 1;
  const std::size_t first = last / 2;
  bool trailing_zero = true;
  for (std::size_t k = first; k <= last; ++k) {
    if (std::abs(coeffs[k]) > 1e-9 * peak) trailing_zero = false;
  }
  if (trailing_zero) return std::numeric_limits<double>::infinity();
  double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
  int cnt = 0;
  for (std::size_t k = first; k <= last; ++k) {
    const double a = std::abs(coeffs[k]);
    if (!(a > 0.0)) continue;
    const double y = std::log(a);
    const double x = static_cast<double>(k);
    sk += x;
    sy += y;
    skk += x * x;
    sky += x * y;
    ++cnt;
  }
  if (cnt < 2) throw Error(ErrorCode::NotEnoughTerms, "too few coefficients to fit");
  const double slope = (cnt * sky - sk * sy) / (cnt * skk - sk * sk);
  return std::exp(-slope);
}

DerivativeCheck derivative_check(const ScalarSlice& g, double r, int m, double h) {
  DerivativeCheck out;
  out.contour = taylor_coefficients(g, r, m, 1)[1];
  out.finite_difference = (g(Complex(h)) - g(Complex(-h))) / (2.0 * h);
  const double scale = std::max(std::abs(out.contour), std::abs(out.finite_difference));
  out.relative = scale > 0.0 ? std::abs(out.contour - out.finite_difference) / scale : 0.0;
  return out;
}

BoundednessScan local_boundedness_scan(const BallMap& f, const ComplexVector& center,
                                       double radius, int samples, std::uint64_t seed,
                                       const MatrixNorm& norm, double cap) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Index n = center.size();
  BoundednessScan out;
  out.argmax = center;
  out.max_norm = -1.0;
  for (int s = 0; s < samples; ++s) {
    ComplexVector p = center;
    if (n > 0) {
      const double rho = radius * std::pow(unif(rng), 1.0 / (2.0 * static_cast<double>(n)));
      p += rho * random_unit_vector(n, rng);
    }
    const ComplexMatrix fm = f(p);
    const double v = norm ? norm(fm) : spectral_norm(fm);
    if (v > out.max_norm) {
      out.max_norm = v;
      out.argmax = p;
    }
  }
  out.exceeded = out.max_norm > cap;
  return out;
}

std::vector<Complex> unwrapped_log(const std::vector<Complex>& values) {
  std::vector<Complex> out;
  out.reserve(values.size());
  double prev = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] == Complex(0.0)) {
      throw Error(ErrorCode::EvaluationFailure, "log of zero");
    }
    double phase = std::arg(values[k]);
    if (k > 0) phase += 2.0 * kPi * std::round((prev - phase) / (2.0 * kPi));
    prev = phase;
    out.emplace_back(std::log(std::abs(values[k])), phase);
  }
  return out;
}

}  // namespace sectorial
