#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace treeflow {

enum class ErrorCode {
  // input / model errors
  GraphFormat,
  ModelConstraint,
  InvalidArgument,
  // graph_core
  InsufficientDepth,
  NotHyperbolic,
  // patterson
  BallTooLarge,
  SubcriticalS,
  DepthTooShallow,
  // crossratio
  DegenerateQuadruple,
  EndOnAxis,
  SharedAxisEnd,
  EmptyInput,
  // dynamics
  OverlappingCylinders,
  // quotient_measure
  InvalidAction,
  InvalidFundDomain,
  NonInvariantH,
  NotCommuting,
  NotMeasurePreserving,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace treeflow
