#include "sectorial/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace sectorial {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::NotSectorial: return "NotSectorial";
    case ErrorCode::NotHermitianizable: return "NotHermitianizable";
    case ErrorCode::NotCoercive: return "NotCoercive";
    case ErrorCode::SpectrumHit: return "SpectrumHit";
    case ErrorCode::ZetaInsideRange: return "ZetaInsideRange";
    case ErrorCode::ContourThroughSpectrum: return "ContourThroughSpectrum";
    case ErrorCode::DegenerateEnclosure: return "DegenerateEnclosure";
    case ErrorCode::EmptyEnclosure: return "EmptyEnclosure";
    case ErrorCode::NotAProjection: return "NotAProjection";
    case ErrorCode::GammaHitsSpectrum: return "GammaHitsSpectrum";
    case ErrorCode::NotSectorialForBeta: return "NotSectorialForBeta";
    case ErrorCode::SectorViolation: return "SectorViolation";
    case ErrorCode::ZeroPartitionFunction: return "ZeroPartitionFunction";
    case ErrorCode::H0NotCoercive: return "H0NotCoercive";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ModulationTooLarge: return "ModulationTooLarge";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::NotNormalizedPair: return "NotNormalizedPair";
    case ErrorCode::RankNotOne: return "RankNotOne";
    case ErrorCode::IsolationLost: return "IsolationLost";
    case ErrorCode::NotEnoughTerms: return "NotEnoughTerms";
    case ErrorCode::EvaluationFailure: return "EvaluationFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": matrix must be square and non-empty");
  }
}

double scale_floor(double norm) {
  return std::max(norm, std::numeric_limits<double>::min());
}

}  // namespace

double norm1(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b,
                    const Options& opt) {
  require_square(a, "solve");
  if (b.rows() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "solve: B is not conformable");
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const double threshold = opt.pivot_tolerance * norm1(a);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot >= threshold) || min_pivot == 0.0) {
    throw Error(ErrorCode::SingularMatrix,
                "pivot magnitude " + std::to_string(min_pivot) +
                    " below threshold " + std::to_string(threshold));
  }
  return lu.solve(b);
}

ComplexMatrix inverse(const ComplexMatrix& a, const Options& opt) {
  return solve(a, ComplexMatrix::Identity(a.rows(), a.cols()), opt);
}

SpectralData eig_oracle(const ComplexMatrix& a, const Options& opt) {
  require_square(a, "eig_oracle");
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a, true);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "complex Schur iteration failed");
  }
  const Index n = a.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
  const auto& values = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    if (values[i].real() != values[j].real()) {
      return values[i].real() < values[j].real();
    }
    return values[i].imag() < values[j].imag();
  });

  SpectralData out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues[k] = values[src];
    ComplexVector v = es.eigenvectors().col(src);
    const double nv = v.norm();
    if (nv > 0.0) v /= nv;
    out.eigenvectors.col(k) = v;
  }

  const double scale = scale_floor(a.norm());
  for (Index k = 0; k < n; ++k) {
    const double residual =
        (a * out.eigenvectors.col(k) - out.eigenvalues[k] * out.eigenvectors.col(k))
            .norm();
    if (residual > opt.eig_residual * scale) {
      throw Error(ErrorCode::NoConvergence,
                  "eigenpair residual " + std::to_string(residual) +
                      " exceeds tolerance");
    }
  }
  const RealVector sv = singular_values(out.eigenvectors);
  const double smin = sv.minCoeff();
  out.condition = smin > 0.0 ? sv.maxCoeff() / smin
                             : std::numeric_limits<double>::infinity();
  return out;
}

HermitianSpectrum hermitian_eig(const ComplexMatrix& h) {
  require_square(h, "hermitian_eig");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "hermitian eigensolver failed");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

double lambda_min_hermitian(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "hermitian eigensolver failed");
  }
  return es.eigenvalues()(0);
}

double lambda_max_hermitian(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "hermitian eigensolver failed");
  }
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

ComplexMatrix expm_oracle(const ComplexMatrix& a, const Options& opt) {
  require_square(a, "expm_oracle");
  const double n1 = norm1(a);
  if (!(n1 <= opt.expm_norm_cap)) {
    throw Error(ErrorCode::Overflow, "||A||_1 = " + std::to_string(n1) +
                                         " exceeds expm_norm_cap");
  }
  return a.exp();
}

RealVector singular_values(const ComplexMatrix& a) {
  if (a.rows() <= 16 && a.cols() <= 16) {
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    return svd.singularValues();
  }
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues();
}

double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a).maxCoeff();
}

double min_singular_value(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a).minCoeff();
}

double schatten_norm(const ComplexMatrix& a, double p) {
  if (!(p >= 1.0)) {
    throw Error(ErrorCode::InvalidP, "Schatten exponent must satisfy p >= 1");
  }
  const RealVector sv = singular_values(a);
  if (std::isinf(p)) return sv.size() ? sv.maxCoeff() : 0.0;
  const double smax = sv.size() ? sv.maxCoeff() : 0.0;
  if (smax == 0.0) return 0.0;
  // Scale by the largest value so large p does not overflow.
  double sum = 0.0;
  for (Index k = 0; k < sv.size(); ++k) sum += std::pow(sv[k] / smax, p);
  return smax * std::pow(sum, 1.0 / p);
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= rel_tol * scale_floor(a.norm());
}

Complex trace(const ComplexMatrix& a) { return a.trace(); }

nlohmann::json matrix_to_json(const ComplexMatrix& a) {
  require_square(a, "matrix_to_json");
  nlohmann::json entries = nlohmann::json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      entries.push_back({a(i, j).real(), a(i, j).imag()});
    }
  }
  return {{"dim", a.rows()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw Error(ErrorCode::InvalidArgument,
                "matrix JSON needs \"dim\" and \"entries\"");
  }
  const auto dim = j.at("dim").get<long long>();
  const auto& entries = j.at("entries");
  if (dim <= 0 || !entries.is_array() ||
      entries.size() != static_cast<std::size_t>(dim * dim)) {
    throw Error(ErrorCode::InvalidArgument,
                "matrix JSON: entries must hold dim*dim [re, im] pairs");
  }
  ComplexMatrix a(dim, dim);
  std::size_t k = 0;
  for (Index r = 0; r < dim; ++r) {
    for (Index c = 0; c < dim; ++c, ++k) {
      const auto& e = entries[k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
          !e[1].is_number()) {
        throw Error(ErrorCode::InvalidArgument,
                    "matrix JSON: entry " + std::to_string(k) +
                        " is not an [re, im] pair");
      }
      const double re = e[0].get<double>();
      const double im = e[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) {
        throw Error(ErrorCode::InvalidArgument, "matrix JSON: non-finite entry");
      }
      a(r, c) = {re, im};
    }
  }
  return a;
}

ComplexMatrix random_matrix(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) a(i, j) = {g(rng), g(rng)};
  }
  return a;
}

ComplexMatrix random_hermitian(Index n, std::mt19937_64& rng) {
  const ComplexMatrix a = random_matrix(n, rng);
  return 0.5 * (a + a.adjoint());
}

ComplexVector random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = {g(rng), g(rng)};
  return v;
}

ComplexVector random_unit_vector(Index n, std::mt19937_64& rng) {
  ComplexVector v = random_vector(n, rng);
  return v / v.norm();
}

}  // namespace sectorial
