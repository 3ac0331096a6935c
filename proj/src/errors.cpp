#include "rayleigh/errors.hpp"

namespace rayleigh {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptyScene: return "EmptyScene";
    case ErrorCode::ZeroSizeShape: return "ZeroSizeShape";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::AsymmetricGrid: return "AsymmetricGrid";
    case ErrorCode::PixelTooSmall: return "PixelTooSmall";
    case ErrorCode::UnsupportedBase: return "UnsupportedBase";
    case ErrorCode::UnsupportedPattern: return "UnsupportedPattern";
    case ErrorCode::CentroidFrameMismatch: return "CentroidFrameMismatch";
    case ErrorCode::OutsideConvergenceRadius: return "OutsideConvergenceRadius";
    case ErrorCode::InvalidBeta: return "InvalidBeta";
    case ErrorCode::AnisotropicPsf: return "AnisotropicPsf";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::NonIdentifiable: return "NonIdentifiable";
    case ErrorCode::InsufficientGrid: return "InsufficientGrid";
    case ErrorCode::DegenerateScene: return "DegenerateScene";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::NotDifferentiable: return "NotDifferentiable";
    case ErrorCode::LinearDependence: return "LinearDependence";
    case ErrorCode::TruncationFailure: return "TruncationFailure";
    case ErrorCode::SingularProbability: return "SingularProbability";
    case ErrorCode::ZeroEvenMoment: return "ZeroEvenMoment";
    case ErrorCode::SingularFIM: return "SingularFIM";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  return static_cast<int>(code) >= static_cast<int>(ErrorCode::OrderTooHigh);
}

}  // namespace rayleigh
