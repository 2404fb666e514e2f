#include "bcrecon/pluecker.hpp"

#include <algorithm>
#include <cmath>

#include "bcrecon/error.hpp"

namespace bcrecon {

std::size_t TripleIndex::position() const {
  for (std::size_t t = 0; t < kTripleCount; ++t) {
    const auto& c = kTripleColumns[t];
    if (c[0] + 1 == i && c[1] + 1 == j && c[2] + 1 == k) return t;
  }
  throw Error(ErrorKind::ContractViolation, "invalid triple index " + label());
}

std::string TripleIndex::label() const {
  return std::to_string(i) + std::to_string(j) + std::to_string(k);
}

TripleIndex TripleIndex::at(std::size_t position) {
  if (position >= kTripleCount) throw Error(ErrorKind::ContractViolation, "triple position out of range");
  const auto& c = kTripleColumns[position];
  return {c[0] + 1, c[1] + 1, c[2] + 1};
}

std::optional<TripleIndex> TripleIndex::parse(const std::string& label) {
  if (label.size() != 3) return std::nullopt;
  for (std::size_t t = 0; t < kTripleCount; ++t)
    if (at(t).label() == label) return at(t);
  return std::nullopt;
}

bool MinorVector::is_zero() const {
  return std::all_of(m.begin(), m.end(), [](Complex z) { return z == Complex{}; });
}

BoundaryMatrix::BoundaryMatrix() : a_(3, 6) {
  for (std::size_t r = 0; r < 3; ++r) a_(r, r) = 1.0;
}

BoundaryMatrix::BoundaryMatrix(ComplexMatrix a) : a_(std::move(a)) {
  if (a_.rows() != 3 || a_.cols() != 6)
    throw Error(ErrorKind::ContractViolation, "boundary matrix must be 3x6");
  if (!a_.all_finite()) throw Error(ErrorKind::ContractViolation, "boundary matrix must be finite");
  const auto s = svd(a_.adjoint()).singular_values;
  if (!(s[2] > 1e-10 * s[0]))
    throw Error(ErrorKind::RankDeficient, "boundary matrix does not have rank 3");
}

BoundaryMatrix BoundaryMatrix::row_transform(const ComplexMatrix& r) const {
  return BoundaryMatrix(r * a_);
}

MinorVector minors_of(const ComplexMatrix& a) {
  if (a.rows() != 3 || a.cols() != 6) throw Error(ErrorKind::ContractViolation, "minors need a 3x6 matrix");
  MinorVector out;
  for (std::size_t t = 0; t < kTripleCount; ++t) {
    const auto& c = kTripleColumns[t];
    std::array<std::array<Complex, 3>, 3> sub{};
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t s = 0; s < 3; ++s) sub[r][s] = a(r, static_cast<std::size_t>(c[s]));
    out[t] = det3(sub);
  }
  return out;
}

MinorVector minors_of(const BoundaryMatrix& a) { return minors_of(a.coefficients()); }

TripleIndex largest_minor(const MinorVector& m) {
  double largest = 0.0;
  for (std::size_t t = 0; t < kTripleCount; ++t) largest = std::max(largest, std::abs(m[t]));
  // Magnitudes equal up to rounding count as a tie; the first triple wins.
  for (std::size_t t = 0; t < kTripleCount; ++t)
    if (std::abs(m[t]) >= (1.0 - 1e-8) * largest) return TripleIndex::at(t);
  return TripleIndex::at(0);
}

BoundaryMatrix reconstruct(const MinorVector& m, std::optional<TripleIndex> pivot,
                           double consistency_tolerance) {
  if (m.is_zero()) throw Error(ErrorKind::ZeroMinorVector, "minor vector is identically zero");
  const TripleIndex s = pivot.value_or(largest_minor(m));
  const Complex ms = m.at(s);
  if (ms == Complex{}) throw Error(ErrorKind::ContractViolation, "pivot minor M_" + s.label() + " is zero");

  const std::array<int, 3> pivots{s.i, s.j, s.k};
  ComplexMatrix a(3, 6);
  for (int r = 0; r < 3; ++r) {
    for (int col = 1; col <= 6; ++col) {
      if (col == pivots[r]) {
        a(r, col - 1) = 1.0;
        continue;
      }
      if (std::find(pivots.begin(), pivots.end(), col) != pivots.end()) continue;
      // Replace the r-th pivot by `col`; the sorting parity fixes the sign.
      std::array<int, 3> tuple = pivots;
      tuple[r] = col;
      int swaps = 0;
      for (int x = 0; x < 3; ++x)
        for (int y = x + 1; y < 3; ++y)
          if (tuple[x] > tuple[y]) ++swaps;
      std::sort(tuple.begin(), tuple.end());
      const Complex value = m.at({tuple[0], tuple[1], tuple[2]}) / ms;
      a(r, col - 1) = swaps % 2 ? -value : value;
    }
  }
  for (int col = 0; col < 6; ++col) a(0, col) *= ms;

  BoundaryMatrix out(std::move(a));
  const double drift = minor_distance(m, minors_of(out));
  if (!(drift <= consistency_tolerance)) {
    throw Error(ErrorKind::InconsistentMinors,
                "minor vector is not the minor vector of any 3x6 matrix (chordal drift " +
                    std::to_string(drift) + ")");
  }
  return out;
}

double minor_distance(const MinorVector& a, const MinorVector& b) {
  const double na = norm2(a.m);
  const double nb = norm2(b.m);
  if (na == 0.0 || nb == 0.0) throw Error(ErrorKind::ZeroMinorVector, "distance to a zero minor vector");
  Complex overlap = 0.0;
  for (std::size_t t = 0; t < kTripleCount; ++t) overlap += std::conj(a[t] / na) * (b[t] / nb);
  // |w - u <u, w>| equals sqrt(1 - |<u, w>|^2) without the cancellation.
  std::array<Complex, kTripleCount> residual{};
  for (std::size_t t = 0; t < kTripleCount; ++t) residual[t] = b[t] / nb - (a[t] / na) * overlap;
  return std::min(1.0, norm2(residual));
}

double span_distance(const BoundaryMatrix& a, const BoundaryMatrix& b) {
  return minor_distance(minors_of(a), minors_of(b));
}

}  // namespace bcrecon
