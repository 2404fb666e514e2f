#include "bcrecon/charode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bcrecon/error.hpp"

namespace bcrecon {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string format(Complex z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

CharacteristicRoots characteristic_roots(const ProblemCoefficients& p) {
  if (!finite(p.p1) || !finite(p.p2) || !finite(p.p3))
    throw Error(ErrorKind::ContractViolation, "problem coefficients must be finite");
  const auto omega = solve_cubic(p.p1, p.p2, p.p3);
  double largest = 0.0;
  for (const auto& w : omega) largest = std::max(largest, std::abs(w));
  double closest = std::abs(omega[0] - omega[1]);
  closest = std::min(closest, std::abs(omega[0] - omega[2]));
  closest = std::min(closest, std::abs(omega[1] - omega[2]));
  if (closest <= kRootSeparation * largest || largest == 0.0) {
    throw Error(ErrorKind::RepeatedRoots, "characteristic roots " + format(omega[0]) + ", " +
                                              format(omega[1]) + ", " + format(omega[2]) +
                                              " are not distinct");
  }
  return {omega};
}

ConditionReport check_theorem1(const ProblemCoefficients& p, double tol) {
  ConditionReport report;
  report.roots = characteristic_roots(p);
  report.tolerance_used = tol;

  const auto& w = report.roots.omega;
  for (int size = 1; size <= 3; ++size) {
    for (int mask = 1; mask < 8; ++mask) {
      if (__builtin_popcount(mask) != size) continue;
      std::vector<int> members;
      for (int i = 0; i < 3; ++i)
        if (mask & (1 << i)) members.push_back(i + 1);
      for (int pattern = 0; pattern < (1 << size); ++pattern) {
        SignedSubsetCheck check;
        check.members = members;
        for (int b = 0; b < size; ++b) {
          const int sign = (pattern >> (size - 1 - b)) & 1 ? -1 : 1;
          check.signs.push_back(sign);
          check.value += static_cast<double>(sign) * w[members[b] - 1];
        }
        check.ok = std::abs(check.value) > tol;
        if (!check.ok && report.condition1_ok) {
          report.condition1_ok = false;
          report.violating_combination = check;
        }
        report.checks.push_back(std::move(check));
      }
    }
  }
  report.p1_nonzero = std::abs(p.p1) > tol;
  report.p2_nonzero = std::abs(p.p2) > tol;
  report.p3_nonzero = std::abs(p.p3) > tol;
  return report;
}

void check_lambda(const CharacteristicRoots& roots, Complex lambda) {
  if (!finite(lambda)) throw Error(ErrorKind::ContractViolation, "lambda must be finite");
  if (std::abs(lambda) <= kLambdaFloor)
    throw Error(ErrorKind::LambdaTooSmall, "|lambda| = " + std::to_string(std::abs(lambda)) +
                                               " is below the nonzero-eigenvalue floor");
  // Products of up to three exponentials appear in the minor expansion.
  double growth = 0.0;
  for (const auto& w : roots.omega) growth += std::max(0.0, (w * lambda).real());
  if (growth > kExponentLimit)
    throw Error(ErrorKind::Range, "exponential growth at lambda = " + format(lambda) +
                                      " exceeds double range");
}

bool lambda_admissible(const CharacteristicRoots& roots, Complex lambda) {
  if (!finite(lambda) || std::abs(lambda) <= kLambdaFloor) return false;
  double growth = 0.0;
  for (const auto& w : roots.omega) growth += std::max(0.0, (w * lambda).real());
  return growth <= kExponentLimit;
}

FundamentalSystem fundamental_system(const CharacteristicRoots& roots, Complex lambda) {
  check_lambda(roots, lambda);
  FundamentalSystem fs;
  fs.lambda = lambda;
  for (int j = 0; j < 3; ++j) fs.exponents[j] = roots.omega[j] * lambda;
  const auto& r = fs.exponents;

  // Inverse Vandermonde via Lagrange basis: c_kj is the x^k coefficient of
  // prod_{l != j} (x - r_l) / (r_j - r_l).
  fs.coefficients = ComplexMatrix(3, 3);
  for (int j = 0; j < 3; ++j) {
    const Complex a = r[(j + 1) % 3];
    const Complex b = r[(j + 2) % 3];
    const Complex den = (r[j] - a) * (r[j] - b);
    fs.coefficients(0, j) = a * b / den;
    fs.coefficients(1, j) = -(a + b) / den;
    fs.coefficients(2, j) = 1.0 / den;
  }
  fs.coefficient_det = 1.0 / ((r[1] - r[0]) * (r[2] - r[0]) * (r[2] - r[1]));
  return fs;
}

BoundaryValues boundary_values(const CharacteristicRoots& roots, Complex lambda) {
  const FundamentalSystem fs = fundamental_system(roots, lambda);
  BoundaryValues out{ComplexMatrix(3, 6), lambda};
  std::array<Complex, 3> growth{};
  for (int j = 0; j < 3; ++j) growth[j] = std::exp(fs.exponents[j]);
  for (int k = 0; k < 3; ++k) {
    out.z(k, k) = 1.0;
    for (int m = 0; m < 3; ++m) {
      Complex sum = 0.0;
      for (int j = 0; j < 3; ++j) {
        Complex power = 1.0;
        for (int e = 0; e < m; ++e) power *= fs.exponents[j];
        sum += fs.coefficients(k, j) * power * growth[j];
      }
      out.z(k, 3 + m) = sum;
    }
  }
  return out;
}

BoundaryValues boundary_values(const ProblemCoefficients& p, Complex lambda) {
  return boundary_values(characteristic_roots(p), lambda);
}

}  // namespace bcrecon
