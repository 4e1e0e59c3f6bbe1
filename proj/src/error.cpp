#include "wrapbench/error.hpp"

namespace wrapbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnimodalDegenerate: return "UnimodalDegenerate";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyScene: return "EmptyScene";
    case ErrorCode::NoClusters: return "NoClusters";
    case ErrorCode::IcpDiverged: return "IcpDiverged";
    case ErrorCode::SectionsNotFound: return "SectionsNotFound";
    case ErrorCode::RopeTooShort: return "RopeTooShort";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::NoFeasibleSafeDistance: return "NoFeasibleSafeDistance";
    case ErrorCode::RadiusUnderflow: return "RadiusUnderflow";
    case ErrorCode::NoWrapDetected: return "NoWrapDetected";
    case ErrorCode::RopeExhausted: return "RopeExhausted";
    case ErrorCode::TrajectoryIncomplete: return "TrajectoryIncomplete";
    case ErrorCode::RodFull: return "RodFull";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

ErrorStage stage_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnimodalDegenerate:
    case ErrorCode::EmptyMask:
    case ErrorCode::DegenerateGeometry:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::EmptyScene:
    case ErrorCode::NoClusters:
    case ErrorCode::IcpDiverged:
    case ErrorCode::SectionsNotFound:
    case ErrorCode::RopeTooShort:
    case ErrorCode::NoWrapDetected:
      return ErrorStage::Perception;
    case ErrorCode::Unreachable:
    case ErrorCode::NoFeasibleSafeDistance:
    case ErrorCode::RadiusUnderflow:
      return ErrorStage::Planning;
    case ErrorCode::RopeExhausted:
    case ErrorCode::TrajectoryIncomplete:
    case ErrorCode::RodFull:
      return ErrorStage::Simulation;
    case ErrorCode::NonConvergence:
      return ErrorStage::Control;
    default:
      return ErrorStage::Other;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace wrapbench
