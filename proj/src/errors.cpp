#include "frlc/types.hpp"

namespace frlc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateMarginal: return "DegenerateMarginal";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::NonPositiveKernel: return "NonPositiveKernel";
    case ErrorKind::MissingIntraCost: return "MissingIntraCost";
    case ErrorKind::NegativeOmega: return "NegativeOmega";
    case ErrorKind::InvalidRank: return "InvalidRank";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace frlc
