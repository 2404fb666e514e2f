#include "bcrecon/complexalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "bcrecon/error.hpp"

namespace bcrecon {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxJacobiSweeps = 80;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::ContractViolation, what);
}

Complex cubic_value(Complex w, Complex c2, Complex c1, Complex c0) {
  return ((w + c2) * w + c1) * w + c0;
}

Complex cubic_slope(Complex w, Complex c2, Complex c1) {
  return (3.0 * w + 2.0 * c2) * w + c1;
}

// One Newton step, kept only if it does not increase the residual.
Complex polish_root(Complex w, Complex c2, Complex c1, Complex c0) {
  const Complex f = cubic_value(w, c2, c1, c0);
  const Complex df = cubic_slope(w, c2, c1);
  if (std::abs(df) == 0.0 || std::abs(f) == 0.0) return w;
  const Complex next = w - f / df;
  if (!finite(next)) return w;
  return std::abs(cubic_value(next, c2, c1, c0)) <= std::abs(f) ? next : w;
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {
  require(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
  require(data_.size() == rows * cols, "entry count does not match matrix dimensions");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

double ComplexMatrix::frobenius_norm() const { return norm2(data_); }

bool ComplexMatrix::all_finite() const { return std::all_of(data_.begin(), data_.end(), finite); }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols() == b.rows(), "matrix product dimension mismatch");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix difference dimension mismatch");
  ComplexMatrix out = a;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) -= b(r, c);
  return out;
}

double norm2(std::span<const Complex> v) {
  // Scaled accumulation so entries near the overflow threshold stay finite.
  double scale = 0.0;
  for (const Complex& z : v) scale = std::max({scale, std::abs(z.real()), std::abs(z.imag())});
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (const Complex& z : v) sum += std::norm(z / scale);
  return scale * std::sqrt(sum);
}

bool lexicographic_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

void sort_lexicographic(std::span<Complex> values) {
  std::sort(values.begin(), values.end(), lexicographic_less);
}

std::array<Complex, 3> solve_cubic(Complex c2, Complex c1, Complex c0) {
  require(finite(c2) && finite(c1) && finite(c0), "cubic coefficients must be finite");

  // Depressed form t^3 + p t + q with w = t - c2/3.
  const Complex shift = c2 / 3.0;
  const Complex p = c1 - c2 * c2 / 3.0;
  const Complex q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  const Complex disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  const Complex plus = -q / 2.0 + disc;
  const Complex minus = -q / 2.0 - disc;
  const Complex u3 = std::abs(plus) >= std::abs(minus) ? plus : minus;

  std::array<Complex, 3> roots{};
  if (std::abs(u3) == 0.0) {
    roots.fill(-shift);
  } else {
    const Complex u = std::pow(u3, 1.0 / 3.0);
    const Complex turn = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    Complex uk = u;
    for (auto& root : roots) {
      root = uk - p / (3.0 * uk) - shift;
      uk *= turn;
    }
  }
  for (auto& root : roots) root = polish_root(root, c2, c1, c0);
  // Roundoff-level components would otherwise decide the sort order of roots
  // lying on a common axis.
  double largest = 0.0;
  for (const auto& root : roots) largest = std::max(largest, std::abs(root));
  const double snap = 64.0 * std::numeric_limits<double>::epsilon() * largest;
  for (auto& root : roots) {
    if (std::abs(root.real()) <= snap) root.real(0.0);
    if (std::abs(root.imag()) <= snap) root.imag(0.0);
  }
  sort_lexicographic(roots);
  return roots;
}

Complex det3(const std::array<std::array<Complex, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Complex det3(const ComplexMatrix& m) {
  require(m.rows() == 3 && m.cols() == 3, "det3 requires a 3x3 matrix");
  std::array<std::array<Complex, 3>, 3> a{};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) a[r][c] = m(r, c);
  return det3(a);
}

SvdResult svd(const ComplexMatrix& m) {
  require(m.all_finite(), "svd input must be finite");
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();

  // Column-major working copies: w holds A V, v holds V.
  std::vector<std::vector<Complex>> w(cols, std::vector<Complex>(rows));
  std::vector<std::vector<Complex>> v(cols, std::vector<Complex>(cols));
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) w[c][r] = m(r, c);
    v[c][c] = 1.0;
  }

  const double tol = 4.0 * kEps;
  // Columns at roundoff level relative to the whole matrix carry no
  // information; rotating among them never settles (always the case for
  // wide inputs).
  const double frob = m.frobenius_norm();
  const double negligible = (kEps * frob) * (kEps * frob);
  int sweep = 0;
  bool converged = cols == 1;
  while (!converged) {
    if (++sweep > kMaxJacobiSweeps) {
      throw Error(ErrorKind::NumericalFailure,
                  "Jacobi SVD did not converge after " + std::to_string(kMaxJacobiSweeps) + " sweeps");
    }
    converged = true;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        Complex gamma = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          alpha += std::norm(w[p][r]);
          beta += std::norm(w[q][r]);
          gamma += std::conj(w[p][r]) * w[q][r];
        }
        const double g = std::abs(gamma);
        if (alpha <= negligible || beta <= negligible) continue;
        if (g == 0.0 || g <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        converged = false;

        const Complex phase = gamma / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        const Complex back = std::conj(phase);
        for (std::size_t r = 0; r < rows; ++r) {
          const Complex ap = w[p][r];
          const Complex aq = back * w[q][r];
          w[p][r] = c * ap - s * aq;
          w[q][r] = s * ap + c * aq;
        }
        for (std::size_t r = 0; r < cols; ++r) {
          const Complex vp = v[p][r];
          const Complex vq = back * v[q][r];
          v[p][r] = c * vp - s * vq;
          v[q][r] = s * vp + c * vq;
        }
      }
    }
  }

  std::vector<double> sigma(cols);
  for (std::size_t c = 0; c < cols; ++c) sigma[c] = norm2(w[c]);
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  SvdResult out;
  out.sweeps = sweep;
  out.singular_values.resize(cols);
  out.right_vectors = ComplexMatrix(cols, cols);
  for (std::size_t k = 0; k < cols; ++k) {
    out.singular_values[k] = sigma[order[k]];
    for (std::size_t r = 0; r < cols; ++r) out.right_vectors(r, k) = v[order[k]][r];
  }

  const std::size_t rank_slots = std::min(rows, cols);
  const double cutoff = (out.singular_values[0] > 0.0 ? out.singular_values[0] : 1.0) * kEps *
                        static_cast<double>(std::max(rows, cols));
  out.left_vectors = ComplexMatrix(rows, rank_slots);
  std::vector<std::vector<Complex>> basis;
  std::vector<std::size_t> missing;
  for (std::size_t k = 0; k < rank_slots; ++k) {
    const double s = out.singular_values[k];
    if (s > cutoff) {
      std::vector<Complex> u = w[order[k]];
      for (auto& x : u) x /= s;
      basis.push_back(std::move(u));
    } else {
      basis.emplace_back();
      missing.push_back(k);
    }
  }
  // Complete the left basis where the singular value carries no direction.
  std::size_t candidate = 0;
  for (std::size_t k : missing) {
    while (candidate < rows) {
      std::vector<Complex> e(rows);
      e[candidate++] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) {
          if (b.empty()) continue;
          Complex dot = 0.0;
          for (std::size_t r = 0; r < rows; ++r) dot += std::conj(b[r]) * e[r];
          for (std::size_t r = 0; r < rows; ++r) e[r] -= dot * b[r];
        }
      const double n = norm2(e);
      if (n > 0.5) {
        for (auto& x : e) x /= n;
        basis[k] = std::move(e);
        break;
      }
    }
  }
  for (std::size_t k = 0; k < rank_slots; ++k)
    for (std::size_t r = 0; r < rows; ++r) out.left_vectors(r, k) = basis[k].empty() ? 0.0 : basis[k][r];
  return out;
}

void normalize_phase(std::span<Complex> v) {
  if (v.empty()) return;
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  const double mag = std::abs(v[best]);
  if (mag == 0.0) return;
  const Complex rot = std::conj(v[best]) / mag;
  for (auto& x : v) x *= rot;
  v[best] = mag;
}

NullspaceResult nullspace_vector(const ComplexMatrix& m) {
  require(m.cols() >= 2, "nullspace extraction needs at least two columns");
  SvdResult s = svd(m);
  const std::size_t n = m.cols();
  NullspaceResult out;
  out.vector.resize(n);
  for (std::size_t r = 0; r < n; ++r) out.vector[r] = s.right_vectors(r, n - 1);
  const double nrm = norm2(out.vector);
  for (auto& x : out.vector) x /= nrm;
  normalize_phase(out.vector);

  const double floor =
      std::max(s.singular_values[0] * kEps, std::numeric_limits<double>::min());
  out.gap = std::max(s.singular_values[n - 2], floor) / std::max(s.singular_values[n - 1], floor);
  out.singular_values = std::move(s.singular_values);
  return out;
}

}  // namespace bcrecon
