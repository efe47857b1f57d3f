#ifndef BCLAB_ERRORS_HPP
#define BCLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bclab {

enum class ErrorKind {
  // experiment construction
  NonStochasticRow,
  NegativeEntry,
  EmptyExperiment,
  DuplicateLabel,
  // dominating measures
  NotPrivileged,
  InvalidWeights,
  // partitions and conditioning
  GroundSetMismatch,
  DimensionMismatch,
  // completeness certificates
  NotBlockConstant,
  DegenerateSupport,
  InternalInconsistency,
  // filtration harness
  FiltrationInvalid,
  // dyadic increment experiments
  LevelMismatch,
  LevelZero,
  LevelOrderViolation,
  UnsupportedFunctional,
  ResourceLimit,
  // front door
  ParseError,
  ToleranceOutOfRange,
};

const char* to_string(ErrorKind kind);

/// All library failures are reported through this type; the kind is stable
/// API, the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace bclab

#endif
