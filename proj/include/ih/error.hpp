#pragma once

#include <stdexcept>
#include <string>

namespace ih {

enum class ErrorKind {
  InvalidArgument,
  DegenerateConfiguration,
  NotNormalizable,
  PointAtInfinity,
  NoConsensus,
  SingularNormalEquations,
  SingularMatrix,
  BehindCamera,
  CalibrationRejected,
  SelfIntersectingPolygon,
  ParseError,
  SchemaVersionMismatch,
  StorageError,
  GridTooLarge,
  GridMismatch,
  DegeneratePoints,
  InsufficientPoints,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace ih
