#include "bcrecon/error.hpp"

namespace bcrecon {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ContractViolation: return "contract-violation";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::RepeatedRoots: return "repeated-roots";
    case ErrorKind::LambdaTooSmall: return "lambda-too-small";
    case ErrorKind::Range: return "range";
    case ErrorKind::RankDeficient: return "rank-deficient";
    case ErrorKind::ZeroMinorVector: return "zero-minor-vector";
    case ErrorKind::InconsistentMinors: return "inconsistent-minors";
    case ErrorKind::TooFewEigenvalues: return "too-few-eigenvalues";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

}  // namespace bcrecon
