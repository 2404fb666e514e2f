#pragma once

#include <array>
#include <optional>
#include <string>

#include "bcrecon/complexalg.hpp"
#include "bcrecon/triples.hpp"

namespace bcrecon {

/// Ascending 1-based column triple (i < j < k) of a 3x6 matrix.
struct TripleIndex {
  int i = 1;
  int j = 2;
  int k = 3;

  /// Lexicographic rank among the 20 triples (0 for 123, 19 for 456).
  std::size_t position() const;
  std::string label() const;  // e.g. "135"

  static TripleIndex at(std::size_t position);
  static std::optional<TripleIndex> parse(const std::string& label);

  friend bool operator==(const TripleIndex&, const TripleIndex&) = default;
};

/// The 20 third-order minors in canonical triple order. Projective: two
/// vectors describe the same boundary conditions iff they are proportional.
struct MinorVector {
  std::array<Complex, kTripleCount> m{};

  Complex& operator[](std::size_t t) { return m[t]; }
  const Complex& operator[](std::size_t t) const { return m[t]; }
  const Complex& at(const TripleIndex& t) const { return m[t.position()]; }

  bool is_zero() const;
  friend bool operator==(const MinorVector&, const MinorVector&) = default;
};

/// 3x6 coefficient matrix of the boundary forms; always rank 3.
class BoundaryMatrix {
 public:
  /// [I3 | 0].
  BoundaryMatrix();
  /// Throws RankDeficient unless the smallest singular value exceeds
  /// 1e-10 times the largest.
  explicit BoundaryMatrix(ComplexMatrix a);

  const ComplexMatrix& coefficients() const noexcept { return a_; }
  Complex operator()(std::size_t r, std::size_t c) const { return a_(r, c); }

  /// Left-multiplies by an invertible 3x3 matrix.
  BoundaryMatrix row_transform(const ComplexMatrix& r) const;

  friend bool operator==(const BoundaryMatrix&, const BoundaryMatrix&) = default;

 private:
  ComplexMatrix a_;
};

/// Minors of an arbitrary 3x6 matrix (no rank requirement).
MinorVector minors_of(const ComplexMatrix& a);
MinorVector minors_of(const BoundaryMatrix& a);

/// Largest |M_S|; near-ties (1e-8 relative) go to the first triple.
TripleIndex largest_minor(const MinorVector& m);

/// Boundary matrix whose minors are proportional to `m`. The pivot columns
/// hold the identity except that row 1 is scaled by m[pivot], so the minors
/// of the result equal `m` itself when `m` is consistent.
/// Throws ZeroMinorVector, or InconsistentMinors when the chordal distance
/// between `m` and the minors of the result exceeds `consistency_tolerance`.
BoundaryMatrix reconstruct(const MinorVector& m, std::optional<TripleIndex> pivot = std::nullopt,
                           double consistency_tolerance = 1e-6);

/// Chordal distance between the projective points: sin of the angle
/// between the two lines through the origin, in [0, 1].
double minor_distance(const MinorVector& a, const MinorVector& b);

/// Zero iff the row spans coincide.
double span_distance(const BoundaryMatrix& a, const BoundaryMatrix& b);

}  // namespace bcrecon
