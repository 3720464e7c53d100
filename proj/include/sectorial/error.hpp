#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sectorial {

enum class ErrorCode {
  SingularMatrix,
  NoConvergence,
  Overflow,
  InvalidP,
  NotSectorial,
  NotHermitianizable,
  NotCoercive,
  SpectrumHit,
  ZetaInsideRange,
  ContourThroughSpectrum,
  DegenerateEnclosure,
  EmptyEnclosure,
  NotAProjection,
  GammaHitsSpectrum,
  NotSectorialForBeta,
  SectorViolation,
  ZeroPartitionFunction,
  H0NotCoercive,
  DimensionMismatch,
  ModulationTooLarge,
  InvalidField,
  NotNormalizedPair,
  RankNotOne,
  IsolationLost,
  NotEnoughTerms,
  EvaluationFailure,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status and a machine-readable record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sectorial
