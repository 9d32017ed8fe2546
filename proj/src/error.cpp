#include "rplab/error.hpp"

namespace rplab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::HermitianPartNotPositive: return "HermitianPartNotPositive";
    case ErrorCode::NotACovariance: return "NotACovariance";
    case ErrorCode::NoSpatialAxis: return "NoSpatialAxis";
    case ErrorCode::SupportError: return "SupportError";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::NoDecay: return "NoDecay";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ZeroSpace: return "ZeroSpace";
    case ErrorCode::HamiltonianUndefined: return "HamiltonianUndefined";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rplab
