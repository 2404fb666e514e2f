#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bcrecon {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Small by design (up to a few hundred rows).
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<Complex> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  const std::vector<Complex>& entries() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  double frobenius_norm() const;
  bool all_finite() const;

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Roots of w^3 + c2 w^2 + c1 w + c0, sorted by (re, im).
std::array<Complex, 3> solve_cubic(Complex c2, Complex c1, Complex c0);

/// Sorts in place by real part, then imaginary part.
void sort_lexicographic(std::span<Complex> values);
bool lexicographic_less(Complex a, Complex b);

Complex det3(const ComplexMatrix& m);
Complex det3(const std::array<std::array<Complex, 3>, 3>& m);

struct SvdResult {
  /// One entry per column of the input, non-increasing. For wide inputs the
  /// trailing cols - rows values are the (near-)zero directions.
  std::vector<double> singular_values;
  /// rows x min(rows, cols), orthonormal columns.
  ComplexMatrix left_vectors;
  /// cols x cols unitary.
  ComplexMatrix right_vectors;
  int sweeps = 0;
};

/// One-sided (Hestenes) Jacobi SVD.
SvdResult svd(const ComplexMatrix& m);

struct NullspaceResult {
  std::vector<Complex> vector;
  double gap = 1.0;
  std::vector<double> singular_values;
};

/// Right singular vector of the smallest singular value, unit norm, with the
/// largest-magnitude entry rotated to the positive real axis.
NullspaceResult nullspace_vector(const ComplexMatrix& m);

/// Rotates `v` so its largest-magnitude entry (first on ties) is real positive.
void normalize_phase(std::span<Complex> v);

double norm2(std::span<const Complex> v);

}  // namespace bcrecon
