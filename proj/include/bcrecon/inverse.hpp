#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bcrecon/charode.hpp"
#include "bcrecon/pluecker.hpp"
#include "bcrecon/spectral.hpp"

namespace bcrecon {

inline constexpr std::size_t kMinimumEigenvalues = 19;

struct InversionSettings {
  double rank_gap_threshold = 1e3;
  double consistency_tolerance = 1e-6;
  std::size_t minimum_eigenvalues = kMinimumEigenvalues;

  void validate() const;
};

/// One row per eigenvalue: (Z_S(lambda_m)) in canonical triple order, scaled
/// to unit Euclidean norm. Throws TooFewEigenvalues below `minimum`.
ComplexMatrix assemble_system(const ProblemCoefficients& p, std::span<const Complex> eigenvalues,
                              std::size_t minimum = kMinimumEigenvalues);

/// Nullspace of the assembled system, before any reconstruction.
struct MinorSolution {
  std::vector<Complex> eigenvalues;  // sorted echo of the input
  MinorVector minors;                // unit norm, largest entry real positive
  std::vector<double> singular_values;
  double rank_gap = 1.0;
};

MinorSolution solve_minors(const ProblemCoefficients& p, std::span<const Complex> eigenvalues,
                           const InversionSettings& settings = {});

struct ReconstructionReport {
  std::vector<Complex> eigenvalues;
  MinorVector minors;
  BoundaryMatrix matrix;
  TripleIndex pivot_used;
  std::vector<double> singular_values;
  double rank_gap = 1.0;
  bool non_unique = false;  // rank gap below the configured threshold
  std::vector<double> residuals;  // |Z(lambda_m) . M| / (|Z(lambda_m)| |M|), M = minors of `matrix`
  ConditionReport theorem1;
  InversionSettings settings;
};

ReconstructionReport invert_spectrum(const ProblemCoefficients& p, std::span<const Complex> eigenvalues,
                                     const InversionSettings& settings = {});

struct PerturbationRecord {
  std::size_t trial = 0;
  double noise_level = 0.0;
  double span_distance = 0.0;  // NaN when the trial failed before minors existed
  std::string status;          // "ok", "inconsistent" or "failed: ..."

  friend bool operator==(const PerturbationRecord&, const PerturbationRecord&) = default;
};

/// Perturbs `eigenvalues` with isotropic complex Gaussian noise (E|dz|^2 =
/// noise_level^2) and inverts each trial. Each trial draws from its own
/// stream seeded by (seed, trial), so results do not depend on scheduling.
std::vector<PerturbationRecord> perturbation_study(const ProblemCoefficients& p, const BoundaryMatrix& truth,
                                                   std::span<const Complex> eigenvalues, double noise_level,
                                                   std::size_t trials, std::uint64_t seed,
                                                   const InversionSettings& settings = {},
                                                   std::size_t threads = 0);

/// Runs the forward solver over `region` first; throws TooFewEigenvalues when
/// it yields fewer than the settings' minimum.
std::vector<PerturbationRecord> perturbation_study(const ProblemCoefficients& p, const BoundaryMatrix& truth,
                                                   const SearchRegion& region, double noise_level,
                                                   std::size_t trials, std::uint64_t seed,
                                                   const InversionSettings& settings = {},
                                                   std::size_t threads = 0);

}  // namespace bcrecon
