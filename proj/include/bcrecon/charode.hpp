#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bcrecon/complexalg.hpp"

namespace bcrecon {

/// Coefficients of y''' + lambda p1 y'' + lambda^2 p2 y' + lambda^3 p3 y = 0.
struct ProblemCoefficients {
  Complex p1;
  Complex p2;
  Complex p3;

  friend bool operator==(const ProblemCoefficients&, const ProblemCoefficients&) = default;
};

inline constexpr double kRootSeparation = 1e-8;  // relative to max |omega|
inline constexpr double kLambdaFloor = 1e-12;
inline constexpr double kExponentLimit = 600.0;  // headroom below exp() overflow at ~709

/// Roots of w^3 + p1 w^2 + p2 w + p3, sorted by (re, im) and pairwise distinct.
struct CharacteristicRoots {
  std::array<Complex, 3> omega;
};

CharacteristicRoots characteristic_roots(const ProblemCoefficients& p);

/// One signed subset sum  sum_{i in I} e_i omega_i.
struct SignedSubsetCheck {
  std::vector<int> members;  // 1-based root indices, ascending
  std::vector<int> signs;    // +1 / -1, parallel to members
  Complex value;
  bool ok = true;
};

struct ConditionReport {
  bool condition1_ok = true;
  std::optional<SignedSubsetCheck> violating_combination;
  bool p1_nonzero = true;
  bool p2_nonzero = true;
  bool p3_nonzero = true;
  double tolerance_used = 0.0;
  CharacteristicRoots roots;
  std::vector<SignedSubsetCheck> checks;  // all 26 combinations, enumeration order

  bool all_ok() const { return condition1_ok && p1_nonzero && p2_nonzero && p3_nonzero; }
};

/// Uniqueness hypotheses on the characteristic roots plus the nonvanishing of
/// p1, p2, p3. Combinations are enumerated by subset size, then
/// lexicographically, with sign patterns counted from all-plus.
ConditionReport check_theorem1(const ProblemCoefficients& p, double tol = 1e-8);

/// Normalized fundamental system y_k(x) = sum_j c_kj exp(r_j x), r_j = omega_j lambda,
/// with y_k^{(m-1)}(0) = delta_km.
struct FundamentalSystem {
  Complex lambda;
  std::array<Complex, 3> exponents;
  ComplexMatrix coefficients;  // 3x3, entry (k, j) = c_kj
  Complex coefficient_det;     // det(coefficients) = 1 / Vandermonde(r)
};

FundamentalSystem fundamental_system(const CharacteristicRoots& roots, Complex lambda);

/// z(k, .) = (y_k(0), y_k'(0), y_k''(0), y_k(1), y_k'(1), y_k''(1)).
struct BoundaryValues {
  ComplexMatrix z;
  Complex lambda;
};

BoundaryValues boundary_values(const ProblemCoefficients& p, Complex lambda);
BoundaryValues boundary_values(const CharacteristicRoots& roots, Complex lambda);

/// Throws LambdaTooSmall / Range when lambda cannot be evaluated.
void check_lambda(const CharacteristicRoots& roots, Complex lambda);
/// Non-throwing form of check_lambda.
bool lambda_admissible(const CharacteristicRoots& roots, Complex lambda);

}  // namespace bcrecon
