#pragma once

// Random problem generators and small independent oracles shared by the
// unit tests and the acceptance runner.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <vector>

#include "bcrecon/charode.hpp"
#include "bcrecon/complexalg.hpp"
#include "bcrecon/error.hpp"
#include "bcrecon/pluecker.hpp"

namespace testsupport {

using bcrecon::Complex;
using bcrecon::ComplexMatrix;

inline constexpr bcrecon::ProblemCoefficients kExampleP{{-3.0, -3.0}, {-2.0, 9.0}, {6.0, 0.0}};

inline bcrecon::BoundaryMatrix example_matrix() {
  ComplexMatrix a(3, 6);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  a(0, 3) = 0.5;
  a(0, 5) = 1.0;
  a(1, 2) = 1.0;
  a(2, 3) = 0.5;
  a(2, 4) = 1.0;
  return bcrecon::BoundaryMatrix(a);
}

/// Printed 2-decimal eigenvalues of the worked example.
inline std::vector<Complex> example_eigenvalues() {
  return {{0.46, -0.12},   {5.88, 3.86},    {6.51, -0.55},   {12.81, -0.56},  {19.1, -0.56},
          {-4.27, 0.51},   {-7.16, 1.06},   {-10.54, 1.0},   {-13.50, 1.32},  {-19.81, 1.49},
          {-23.1, 1.41},   {-26.11, 1.61},  {-29.38, 1.54},  {-32.41, 1.71},  {-35.67, 1.64},
          {-38.7, 1.8},    {-44.99, 1.87},  {-48.23, 1.80},  {-51.28, 1.93}};
}

inline std::filesystem::path fixture(const char* name) {
  return std::filesystem::path(BCRECON_FIXTURE_DIR) / name;
}

/// Uniform on the unit disc.
inline Complex unit_disc(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = std::sqrt(u(rng));
  const double t = 2.0 * 3.14159265358979323846 * u(rng);
  return std::polar(r, t);
}

/// Components uniform in [-scale, scale].
inline Complex box(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  const double re = u(rng);
  return {re, u(rng)};
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = box(rng, scale);
  return m;
}

inline bcrecon::BoundaryMatrix random_boundary(std::mt19937_64& rng) {
  for (;;) {
    ComplexMatrix a(3, 6);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 6; ++c) a(r, c) = unit_disc(rng);
    try {
      return bcrecon::BoundaryMatrix(a);
    } catch (const bcrecon::Error&) {
    }
  }
}

/// Well-conditioned random 3x3 matrix.
inline ComplexMatrix random_invertible3(std::mt19937_64& rng) {
  for (;;) {
    ComplexMatrix r = random_matrix(rng, 3, 3);
    if (std::abs(bcrecon::det3(r)) > 0.2) return r;
  }
}

/// Random coefficients whose roots are separated by at least `gap`.
inline bcrecon::ProblemCoefficients random_problem(std::mt19937_64& rng, double scale = 3.0, double gap = 0.3) {
  for (;;) {
    const Complex w1 = box(rng, scale);
    const Complex w2 = box(rng, scale);
    const Complex w3 = box(rng, scale);
    if (std::abs(w1 - w2) < gap || std::abs(w1 - w3) < gap || std::abs(w2 - w3) < gap) continue;
    return {-(w1 + w2 + w3), w1 * w2 + w1 * w3 + w2 * w3, -(w1 * w2 * w3)};
  }
}

/// Cofactor determinant written out independently of the library.
inline Complex det3_oracle(const ComplexMatrix& m, int c0, int c1, int c2) {
  auto e = [&](int r, int c) { return m(static_cast<std::size_t>(r), static_cast<std::size_t>(c)); };
  return e(0, c0) * (e(1, c1) * e(2, c2) - e(1, c2) * e(2, c1)) -
         e(0, c1) * (e(1, c0) * e(2, c2) - e(1, c2) * e(2, c0)) +
         e(0, c2) * (e(1, c0) * e(2, c1) - e(1, c1) * e(2, c0));
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double d = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) d = std::max(d, std::abs(a(r, c) - b(r, c)));
  return d;
}

/// Right-hand side of the ODE as a first-order system, state (y, y', y'').
struct OdeSystem {
  bcrecon::ProblemCoefficients p;
  Complex lambda;

  std::array<Complex, 3> operator()(const std::array<Complex, 3>& s) const {
    const Complex l2 = lambda * lambda;
    return {s[1], s[2], -(lambda * p.p1 * s[2] + l2 * p.p2 * s[1] + l2 * lambda * p.p3 * s[0])};
  }
};

/// Adaptive Dormand-Prince 5(4) integration of the state from x = 0 to x = 1.
inline std::array<Complex, 3> integrate_dopri(const OdeSystem& f, std::array<Complex, 3> y, double rtol = 1e-13,
                                              double atol = 1e-15) {
  using State = std::array<Complex, 3>;
  auto axpy = [](const State& base, std::initializer_list<std::pair<double, const State*>> terms, double h) {
    State out = base;
    for (const auto& [c, k] : terms)
      for (int i = 0; i < 3; ++i) out[i] += h * c * (*k)[i];
    return out;
  };
  double x = 0.0;
  double h = 1e-3;
  State k1 = f(y);
  while (x < 1.0) {
    if (x + h > 1.0) h = 1.0 - x;
    const State k2 = f(axpy(y, {{1.0 / 5, &k1}}, h));
    const State k3 = f(axpy(y, {{3.0 / 40, &k1}, {9.0 / 40, &k2}}, h));
    const State k4 = f(axpy(y, {{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}}, h));
    const State k5 = f(axpy(y, {{19372.0 / 6561, &k1}, {-25360.0 / 2187, &k2}, {64448.0 / 6561, &k3},
                                {-212.0 / 729, &k4}}, h));
    const State k6 = f(axpy(y, {{9017.0 / 3168, &k1}, {-355.0 / 33, &k2}, {46732.0 / 5247, &k3},
                                {49.0 / 176, &k4}, {-5103.0 / 18656, &k5}}, h));
    const State y5 = axpy(y, {{35.0 / 384, &k1}, {500.0 / 1113, &k3}, {125.0 / 192, &k4},
                              {-2187.0 / 6784, &k5}, {11.0 / 84, &k6}}, h);
    const State k7 = f(y5);
    const State y4 = axpy(y, {{5179.0 / 57600, &k1}, {7571.0 / 16695, &k3}, {393.0 / 640, &k4},
                              {-92097.0 / 339200, &k5}, {187.0 / 2100, &k6}, {1.0 / 40, &k7}}, h);
    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(y5[i] - y4[i]) / sc);
    }
    if (err <= 1.0) {
      x += h;
      y = y5;
      k1 = k7;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
  }
  return y;
}

}  // namespace testsupport
