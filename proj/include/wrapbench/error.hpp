#ifndef WRAPBENCH_ERROR_HPP
#define WRAPBENCH_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace wrapbench {

enum class ErrorCode {
  // imaging
  UnimodalDegenerate,
  EmptyMask,
  DegenerateGeometry,
  DimensionMismatch,
  // rod estimation
  EmptyScene,
  NoClusters,
  IcpDiverged,
  // rope tracing
  SectionsNotFound,
  RopeTooShort,
  // planning
  Unreachable,
  NoFeasibleSafeDistance,
  RadiusUnderflow,
  // feedback
  NoWrapDetected,
  // simulation
  RopeExhausted,
  TrajectoryIncomplete,
  RodFull,
  // harness
  NonConvergence,
  InvalidConfig,
  Usage,
  Io,
};

enum class ErrorStage { Perception, Planning, Simulation, Control, Other };

std::string_view to_string(ErrorCode code);
ErrorStage stage_of(ErrorCode code);

/// Single exception type carried through the whole pipeline. The code
/// identifies the failure; the message carries context for logs.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  ErrorStage stage() const noexcept { return stage_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace wrapbench

#endif  // WRAPBENCH_ERROR_HPP
