#ifndef SPIKED_ERRORS_HPP
#define SPIKED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spiked {

enum class ErrorCode {
  OddDegree,
  NonpositiveLeading,
  EmptyCoefficients,
  InconsistentInputs,
  NonFiniteIntegrand,
  EvaluationPointOutsideOpenInterval,
  TailNotDecaying,
  NewtonDiverged,
  MultiBandSuspected,
  DegreeMismatch,
  BranchCut,
  NonpositiveSpike,
  SearchHorizonExceeded,
  NoInteriorMaximum,
  AtEdge,
  NonSmoothInput,
  NuRequired,
  OutsideDomain,
  SubcriticalUnsupported,
  IndexOutOfRange,
  DegenerateGap,
  UnsupportedBeta,
  SeriesTruncationInsufficient,
  EmptySample,
  ContourDisagreement,
  DomainViolation,
  SupportNotNormalized,
  IndicatorStarvation,
  NoConvergence,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

} // namespace spiked

#endif
