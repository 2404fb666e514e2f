#pragma once

// Batched 3x3 minor kernels over many evaluation points.
//
// A basis batch holds, for each point, a 3x6 complex matrix W in
// structure-of-arrays layout: entry e = row * 6 + col lives at
// re[e * count + point]. For every point the kernels produce the 20 column
// triple determinants det W[:, S] (and the sum of magnitudes of their six
// Leibniz terms), or their contraction with a fixed minor vector.
//
// The scalar and AVX2 paths perform the same operations in the same order
// and are compiled without FP contraction, so their results are bitwise equal.

#include <array>
#include <cstddef>
#include <vector>

#include "bcrecon/complexalg.hpp"
#include "bcrecon/triples.hpp"

namespace bcrecon::kernels {

inline constexpr std::size_t kBasisEntries = 18;

struct BasisBatch {
  explicit BasisBatch(std::size_t n = 0)
      : count(n), re(kBasisEntries * n), im(kBasisEntries * n) {}

  void set(std::size_t point, int row, int col, Complex value) {
    const std::size_t e = static_cast<std::size_t>(row * 6 + col);
    re[e * count + point] = value.real();
    im[e * count + point] = value.imag();
  }

  std::size_t count;
  std::vector<double> re;
  std::vector<double> im;
};

struct TripleBatch {
  explicit TripleBatch(std::size_t n = 0)
      : count(n), re(kTripleCount * n), im(kTripleCount * n), magnitude(kTripleCount * n) {}

  Complex value(std::size_t point, std::size_t triple) const {
    return {re[triple * count + point], im[triple * count + point]};
  }

  std::size_t count;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> magnitude;
};

struct ExpansionBatch {
  explicit ExpansionBatch(std::size_t n = 0) : re(n), im(n), magnitude(n) {}

  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> magnitude;
};

/// Minor vector split into planar arrays for the expansion kernel.
struct PlanarMinors {
  explicit PlanarMinors(const std::array<Complex, kTripleCount>& m);

  std::array<double, kTripleCount> re{};
  std::array<double, kTripleCount> im{};
  std::array<double, kTripleCount> magnitude{};
};

enum class Backend { Scalar, Avx2 };

const char* to_string(Backend backend);
bool backend_available(Backend backend);

/// Best available backend unless overridden by set_backend() or the
/// BCRECON_SIMD environment variable ("scalar" or "avx2").
Backend active_backend();
void set_backend(Backend backend);

/// Kernels over points [first, last). Output batches are sized like the input.
void triple_determinants(const BasisBatch& in, std::size_t first, std::size_t last, TripleBatch& out);
void expand_minors(const BasisBatch& in, const PlanarMinors& minors, std::size_t first,
                   std::size_t last, ExpansionBatch& out);

namespace scalar {
void triple_determinants(const BasisBatch& in, std::size_t first, std::size_t last, TripleBatch& out);
void expand_minors(const BasisBatch& in, const PlanarMinors& minors, std::size_t first,
                   std::size_t last, ExpansionBatch& out);
}  // namespace scalar

namespace avx2 {
void triple_determinants(const BasisBatch& in, std::size_t first, std::size_t last, TripleBatch& out);
void expand_minors(const BasisBatch& in, const PlanarMinors& minors, std::size_t first,
                   std::size_t last, ExpansionBatch& out);
}  // namespace avx2

}  // namespace bcrecon::kernels
