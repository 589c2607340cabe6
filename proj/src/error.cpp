#include "ih/error.hpp"

namespace ih {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::NotNormalizable: return "NotNormalizable";
    case ErrorKind::PointAtInfinity: return "PointAtInfinity";
    case ErrorKind::NoConsensus: return "NoConsensus";
    case ErrorKind::SingularNormalEquations: return "SingularNormalEquations";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::CalibrationRejected: return "CalibrationRejected";
    case ErrorKind::SelfIntersectingPolygon: return "SelfIntersectingPolygon";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorKind::StorageError: return "StorageError";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::DegeneratePoints: return "DegeneratePoints";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace ih
