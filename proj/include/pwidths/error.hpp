#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pwidths {

enum class ErrorKind {
  InvalidArgument,
  UnsupportedRegime,
  PointsCoincide,
  BeyondInjectivityRadius,
  ShootingNoConverge,
  VectorTooLong,
  OutOfDomain,
  NewtonNoConverge,
  IdenticallyZeroOnCircle,
  NotASolution,
  LambdaAtPole,
  PreconditionDecayFailed,
  IntegratorBlowup,
  NoCrossings,
  OddCount,
  ImmersionViolated,
  SegmentsOverlap,
  LeftEmbeddingClass,
  NotStationary,
  AssemblyMismatch,
  QTooSmall,
  MuTooLarge,
  TableTooSmall,
  AssertionFailed,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the ErrorKind tags so
/// callers (and the CLI exit-code logic) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace pwidths
