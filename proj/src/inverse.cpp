#include "bcrecon/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bcrecon/error.hpp"
#include "bcrecon/parallel.hpp"

namespace bcrecon {

void InversionSettings::validate() const {
  if (!(rank_gap_threshold > 1.0))
    throw Error(ErrorKind::ContractViolation, "rank gap threshold must exceed 1");
  if (!(consistency_tolerance > 0.0 && consistency_tolerance < 1.0))
    throw Error(ErrorKind::ContractViolation, "consistency tolerance must lie in (0, 1)");
  if (minimum_eigenvalues < kMinimumEigenvalues)
    throw Error(ErrorKind::ContractViolation, "at least 19 eigenvalues are required");
}

ComplexMatrix assemble_system(const ProblemCoefficients& p, std::span<const Complex> eigenvalues,
                              std::size_t minimum) {
  if (eigenvalues.size() < minimum) {
    throw Error(ErrorKind::TooFewEigenvalues, "need at least " + std::to_string(minimum) +
                                                  " eigenvalues, got " + std::to_string(eigenvalues.size()));
  }
  const CharacteristicRoots roots = characteristic_roots(p);
  const auto rows = triple_values(roots, eigenvalues);
  ComplexMatrix system(eigenvalues.size(), kTripleCount);
  for (std::size_t m = 0; m < rows.size(); ++m) {
    const double n = norm2(rows[m]);
    if (!(n > 0.0) || !std::isfinite(n))
      throw Error(ErrorKind::NumericalFailure, "degenerate system row for eigenvalue #" + std::to_string(m + 1));
    for (std::size_t t = 0; t < kTripleCount; ++t) system(m, t) = rows[m][t] / n;
  }
  return system;
}

namespace {

double system_residual(const ComplexMatrix& system, const MinorVector& m) {
  double sum = 0.0;
  for (std::size_t r = 0; r < system.rows(); ++r) {
    Complex dot = 0.0;
    for (std::size_t t = 0; t < kTripleCount; ++t) dot += system(r, t) * m[t];
    sum += std::norm(dot);
  }
  return std::sqrt(sum) / norm2(m.m);
}

// Gauss-Newton on the nine entries outside the pivot columns, minimizing
// |system * minors(A)|. The pivot projection alone inherits the nullspace
// vector's small departure from the Grassmannian; this pulls the matrix back
// onto the data. Minors are linear in each column, so d minors / d a_rc is
// the minor vector of A with column c replaced by e_r.
BoundaryMatrix refine_against_system(const ComplexMatrix& system, BoundaryMatrix a, const TripleIndex& pivot) {
  std::array<std::size_t, 3> free_cols{};
  std::size_t nf = 0;
  for (std::size_t c = 0; c < 6; ++c) {
    const int col = static_cast<int>(c) + 1;
    if (col != pivot.i && col != pivot.j && col != pivot.k) free_cols[nf++] = c;
  }
  double best = system_residual(system, minors_of(a));
  for (int iteration = 0; iteration < 4 && best > 0.0; ++iteration) {
    const ComplexMatrix& coef = a.coefficients();
    const MinorVector m = minors_of(coef);
    ComplexMatrix jac(system.rows(), 9);
    std::vector<Complex> residual(system.rows());
    for (std::size_t r = 0; r < system.rows(); ++r)
      for (std::size_t t = 0; t < kTripleCount; ++t) residual[r] += system(r, t) * m[t];
    for (std::size_t q = 0; q < 9; ++q) {
      ComplexMatrix e = coef;
      const std::size_t row = q / 3;
      const std::size_t col = free_cols[q % 3];
      // Minors are linear in each column; the ones without this column do not move.
      for (std::size_t k = 0; k < 3; ++k) e(k, col) = 0.0;
      const MinorVector base = minors_of(e);
      e(row, col) = 1.0;
      const MinorVector d = minors_of(e);
      for (std::size_t r = 0; r < system.rows(); ++r) {
        Complex dot = 0.0;
        for (std::size_t t = 0; t < kTripleCount; ++t) dot += system(r, t) * (d[t] - base[t]);
        jac(r, q) = dot;
      }
    }
    const SvdResult s = svd(jac);
    const double floor = s.singular_values[0] * 1e-13;
    std::array<Complex, 9> step{};
    for (std::size_t k = 0; k < 9 && k < system.rows(); ++k) {
      if (s.singular_values[k] <= floor) continue;
      Complex uk = 0.0;
      for (std::size_t r = 0; r < system.rows(); ++r) uk += std::conj(s.left_vectors(r, k)) * residual[r];
      uk /= s.singular_values[k];
      for (std::size_t q = 0; q < 9; ++q) step[q] -= s.right_vectors(q, k) * uk;
    }
    ComplexMatrix next = coef;
    for (std::size_t q = 0; q < 9; ++q) next(q / 3, free_cols[q % 3]) += step[q];
    if (!next.all_finite()) break;
    const double value = system_residual(system, minors_of(next));
    if (!(value < best)) break;
    best = value;
    a = BoundaryMatrix(next);
  }
  return a;
}

}  // namespace

MinorSolution solve_minors(const ProblemCoefficients& p, std::span<const Complex> eigenvalues,
                           const InversionSettings& settings) {
  settings.validate();
  MinorSolution out;
  out.eigenvalues.assign(eigenvalues.begin(), eigenvalues.end());
  sort_lexicographic(out.eigenvalues);
  const ComplexMatrix system = assemble_system(p, out.eigenvalues, settings.minimum_eigenvalues);
  NullspaceResult ns = nullspace_vector(system);
  std::copy(ns.vector.begin(), ns.vector.end(), out.minors.m.begin());
  out.singular_values = std::move(ns.singular_values);
  out.rank_gap = ns.gap;
  return out;
}

ReconstructionReport invert_spectrum(const ProblemCoefficients& p, std::span<const Complex> eigenvalues,
                                     const InversionSettings& settings) {
  MinorSolution solution = solve_minors(p, eigenvalues, settings);
  ReconstructionReport report;
  report.settings = settings;
  report.theorem1 = check_theorem1(p);
  report.pivot_used = largest_minor(solution.minors);
  // Rescaled so the pivot minor is 1: the reconstructed matrix then has an
  // identity block in the pivot columns.
  MinorVector scaled = solution.minors;
  const Complex pivot_value = scaled.at(report.pivot_used);
  for (auto& v : scaled.m) v /= pivot_value;
  report.matrix = reconstruct(scaled, report.pivot_used, settings.consistency_tolerance);
  report.matrix = refine_against_system(assemble_system(p, solution.eigenvalues, settings.minimum_eigenvalues),
                                        report.matrix, report.pivot_used);
  report.minors = solution.minors;
  report.eigenvalues = std::move(solution.eigenvalues);
  report.singular_values = std::move(solution.singular_values);
  report.rank_gap = solution.rank_gap;
  report.non_unique = report.rank_gap < settings.rank_gap_threshold;

  // Same normalization as the rows of the system, so the residuals are
  // directly comparable with its smallest singular value.
  const MinorVector m = minors_of(report.matrix);
  const double m_norm = norm2(m.m);
  const auto rows = triple_values(report.theorem1.roots, report.eigenvalues);
  report.residuals.reserve(rows.size());
  for (const auto& z : rows) {
    Complex delta = 0.0;
    for (std::size_t t = 0; t < kTripleCount; ++t) delta += z[t] * m[t];
    report.residuals.push_back(std::abs(delta) / (norm2(z) * m_norm));
  }
  return report;
}

std::vector<PerturbationRecord> perturbation_study(const ProblemCoefficients& p, const BoundaryMatrix& truth,
                                                   std::span<const Complex> eigenvalues, double noise_level,
                                                   std::size_t trials, std::uint64_t seed,
                                                   const InversionSettings& settings, std::size_t threads) {
  if (!(noise_level >= 0.0) || !std::isfinite(noise_level))
    throw Error(ErrorKind::ContractViolation, "noise level must be a finite non-negative number");
  settings.validate();
  const MinorVector true_minors = minors_of(truth);
  const std::vector<Complex> base(eigenvalues.begin(), eigenvalues.end());
  std::vector<PerturbationRecord> records(trials);

  parallel_chunks(trials, 1, threads, [&](std::size_t first, std::size_t last) {
    for (std::size_t trial = first; trial < last; ++trial) {
      PerturbationRecord& rec = records[trial];
      rec.trial = trial;
      rec.noise_level = noise_level;
      rec.span_distance = std::numeric_limits<double>::quiet_NaN();

      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> component(0.0, noise_level / std::sqrt(2.0));
      std::vector<Complex> noisy = base;
      if (noise_level > 0.0)
        for (auto& z : noisy) z += Complex(component(rng), component(rng));

      try {
        const MinorSolution solution = solve_minors(p, noisy, settings);
        rec.span_distance = minor_distance(true_minors, solution.minors);
        try {
          reconstruct(solution.minors, std::nullopt, settings.consistency_tolerance);
          rec.status = "ok";
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::InconsistentMinors) throw;
          rec.status = "inconsistent";
        }
      } catch (const Error& e) {
        rec.status = std::string("failed: ") + to_string(e.kind());
      }
    }
  });
  return records;
}

std::vector<PerturbationRecord> perturbation_study(const ProblemCoefficients& p, const BoundaryMatrix& truth,
                                                   const SearchRegion& region, double noise_level,
                                                   std::size_t trials, std::uint64_t seed,
                                                   const InversionSettings& settings, std::size_t threads) {
  ForwardOptions options;
  options.threads = threads;
  const ForwardResult forward = find_eigenvalues(p, truth, region, options);
  if (forward.spectrum.eigenvalues.size() < settings.minimum_eigenvalues) {
    throw Error(ErrorKind::TooFewEigenvalues,
                "forward stage found " + std::to_string(forward.spectrum.eigenvalues.size()) +
                    " eigenvalues, need " + std::to_string(settings.minimum_eigenvalues));
  }
  return perturbation_study(p, truth, forward.spectrum.eigenvalues, noise_level, trials, seed, settings, threads);
}

}  // namespace bcrecon
