#pragma once

#include <stdexcept>
#include <string>

namespace rayleigh {

enum class ErrorCode {
  // validation failures (CLI exit code 2)
  InvalidArgument,
  GridMismatch,
  EmptyScene,
  ZeroSizeShape,
  DegenerateCovariance,
  AsymmetricGrid,
  PixelTooSmall,
  UnsupportedBase,
  UnsupportedPattern,
  CentroidFrameMismatch,
  OutsideConvergenceRadius,
  InvalidBeta,
  AnisotropicPsf,
  InvalidDistribution,
  NonIdentifiable,
  InsufficientGrid,
  DegenerateScene,
  ConfigError,
  IoError,
  // numerical failures (CLI exit code 3)
  OrderTooHigh,
  NotDifferentiable,
  LinearDependence,
  TruncationFailure,
  SingularProbability,
  ZeroEvenMoment,
  SingularFIM,
  NegativeRadicand,
};

const char* to_string(ErrorCode code);
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rayleigh
