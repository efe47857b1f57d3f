#include "bclab/errors.hpp"

namespace bclab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonStochasticRow: return "NonStochasticRow";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::EmptyExperiment: return "EmptyExperiment";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::NotPrivileged: return "NotPrivileged";
    case ErrorKind::InvalidWeights: return "InvalidWeights";
    case ErrorKind::GroundSetMismatch: return "GroundSetMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotBlockConstant: return "NotBlockConstant";
    case ErrorKind::DegenerateSupport: return "DegenerateSupport";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::FiltrationInvalid: return "FiltrationInvalid";
    case ErrorKind::LevelMismatch: return "LevelMismatch";
    case ErrorKind::LevelZero: return "LevelZero";
    case ErrorKind::LevelOrderViolation: return "LevelOrderViolation";
    case ErrorKind::UnsupportedFunctional: return "UnsupportedFunctional";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ToleranceOutOfRange: return "ToleranceOutOfRange";
  }
  return "UnknownError";
}

}  // namespace bclab
