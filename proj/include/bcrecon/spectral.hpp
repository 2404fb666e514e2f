#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bcrecon/charode.hpp"
#include "bcrecon/kernels.hpp"
#include "bcrecon/pluecker.hpp"

namespace bcrecon {

struct SearchRegion {
  double re_min = -55.0;
  double re_max = 25.0;
  double im_min = -5.0;
  double im_max = 5.0;
  double grid_density = 4.0;  // samples per unit length along each axis

  static constexpr double kExcludedRadius = 1e-6;

  void validate() const;
  bool contains(Complex z) const;

  friend bool operator==(const SearchRegion&, const SearchRegion&) = default;
};

struct Spectrum {
  std::vector<Complex> eigenvalues;  // sorted by (re, im)
  SearchRegion region;
  double tolerance = 1e-10;
};

/// Delta(lambda) together with two upper bounds on its magnitude: the sum of
/// the absolute Leibniz terms of the minor expansion, and the product of the
/// row norms of the matrix [U_i(y_k)].
struct DeterminantSample {
  Complex value;
  double term_bound = 0.0;
  double row_bound = 0.0;
  bool valid = false;

  double scale() const { return std::min(term_bound, row_bound); }
  /// |Delta| / scale in [0, ~1]; 1 for invalid samples.
  double normalized() const;
};

/// Characteristic determinant of one problem, evaluated through the minor
/// expansion  sum_S Z_S(lambda) M_S  with Z_S = det(C) det(W[:, S]), where W
/// holds the exponential basis exp(r_j x) and its derivatives at x = 0, 1.
class CharacteristicDeterminant {
 public:
  CharacteristicDeterminant(const ProblemCoefficients& p, const BoundaryMatrix& a);
  CharacteristicDeterminant(const CharacteristicRoots& roots, const BoundaryMatrix& a);

  /// Throws LambdaTooSmall / Range for inadmissible lambda.
  DeterminantSample operator()(Complex lambda) const;
  /// Inadmissible points come back with valid == false.
  std::vector<DeterminantSample> evaluate(std::span<const Complex> lambdas, std::size_t threads = 1) const;

  const CharacteristicRoots& roots() const noexcept { return roots_; }
  const MinorVector& minors() const noexcept { return minors_; }

 private:
  CharacteristicRoots roots_;
  ComplexMatrix a_;
  MinorVector minors_;
  kernels::PlanarMinors planar_;
};

/// Z_S(lambda) for every triple, i.e. det3 of the boundary values restricted
/// to columns S.
std::array<Complex, kTripleCount> triple_values(const CharacteristicRoots& roots, Complex lambda);
std::vector<std::array<Complex, kTripleCount>> triple_values(const CharacteristicRoots& roots,
                                                             std::span<const Complex> lambdas,
                                                             std::size_t threads = 1);

Complex char_det(const ProblemCoefficients& p, const BoundaryMatrix& a, Complex lambda);

/// det[U_i(y_k)] formed directly from boundary_values. Loses accuracy once
/// the exponential solutions dominate (Re(omega lambda) beyond ~10).
Complex char_det_direct(const ProblemCoefficients& p, const BoundaryMatrix& a, Complex lambda);

struct ForwardOptions {
  std::size_t max_count = 1000;
  std::size_t threads = 0;  // 0 = BCRECON_THREADS / hardware
  double tolerance = 1e-10;
  double dedup_distance = 1e-6;
  int max_newton_iterations = 60;
};

struct ForwardDiagnostics {
  std::size_t grid_points = 0;
  std::size_t seeds = 0;
  std::size_t converged = 0;
  std::size_t outside_region = 0;
  std::size_t duplicates_merged = 0;
  std::vector<Complex> non_converged_seeds;
  std::vector<Complex> clusters;  // merged points that were not numerically identical
  ConditionReport theorem1;
  std::vector<std::string> warnings;
};

struct ForwardResult {
  Spectrum spectrum;
  ForwardDiagnostics diagnostics;
};

/// Grid scan of |Delta| / scale, Newton polishing from every local minimum,
/// deduplication and sorting. Deterministic for any thread count.
ForwardResult find_eigenvalues(const ProblemCoefficients& p, const BoundaryMatrix& a,
                               const SearchRegion& region, const ForwardOptions& options = {});

struct PolishResult {
  Complex lambda;
  bool converged = false;
  int iterations = 0;
  double residual = 1.0;
};

/// Newton iteration with a central finite-difference derivative.
PolishResult polish_eigenvalue(const CharacteristicDeterminant& f, Complex start, double tolerance = 1e-10,
                               int max_iterations = 60, double max_step = 0.5);

}  // namespace bcrecon
