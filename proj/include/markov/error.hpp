#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace markov {

enum class ErrorCode {
  NonSquare,
  NegativeEntry,
  RowSumViolation,
  DimensionMismatch,
  SingularMatrix,
  NotARecurrentClass,
  InternalInconsistency,
  EmptyTransientSet,
  InvalidMoveDistribution,
  NoForwardMotion,
  NegativeDisplacement,
  TooFewSquares,
  InvalidSquare,
  SelfRedirect,
  InvalidDeck,
  DestinationResolution,
  OrderingViolation,
  StartNotTransient,
  StartNotRecurrent,
  MultipleRecurrentClasses,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code is
/// stable and meant for programmatic checks; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace markov
