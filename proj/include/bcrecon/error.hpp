#pragma once

#include <stdexcept>
#include <string>

namespace bcrecon {

enum class ErrorKind {
  ContractViolation,
  NumericalFailure,
  RepeatedRoots,
  LambdaTooSmall,
  Range,
  RankDeficient,
  ZeroMinorVector,
  InconsistentMinors,
  TooFewEigenvalues,
  Parse,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bcrecon
