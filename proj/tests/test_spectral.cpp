#include <doctest.h>

#include <complex>
#include <random>

#include "bcrecon/error.hpp"
#include "bcrecon/spectral.hpp"
#include "support.hpp"

using namespace bcrecon;
using testsupport::kExampleP;

namespace {

using LComplex = std::complex<long double>;

// Direct characteristic determinant in long double for the worked-example
// roots i, 2i, 3. Double precision cancels too much near Re(lambda) = 3.
long double example_det_long(const BoundaryMatrix& a, Complex lambda) {
  const LComplex l(lambda.real(), lambda.imag());
  const std::array<LComplex, 3> w{LComplex(0, 1) * l, LComplex(0, 2) * l, LComplex(3, 0) * l};
  // v(m, j) = w_j^m; the fundamental system has coefficients inv(v).
  std::array<std::array<LComplex, 3>, 3> v{};
  for (int j = 0; j < 3; ++j) {
    v[0][j] = 1.0L;
    v[1][j] = w[j];
    v[2][j] = w[j] * w[j];
  }
  const LComplex det_v = v[0][0] * (v[1][1] * v[2][2] - v[1][2] * v[2][1]) -
                         v[0][1] * (v[1][0] * v[2][2] - v[1][2] * v[2][0]) +
                         v[0][2] * (v[1][0] * v[2][1] - v[1][1] * v[2][0]);
  std::array<std::array<LComplex, 3>, 3> c{};  // c[j][k] = inv(v)(j, k)
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      const int r0 = (k + 1) % 3, r1 = (k + 2) % 3, c0 = (j + 1) % 3, c1 = (j + 2) % 3;
      c[j][k] = (v[r0][c0] * v[r1][c1] - v[r0][c1] * v[r1][c0]) / det_v;
    }
  // z(k, col): derivative (col mod 3) of y_k at 0 or 1.
  std::array<std::array<LComplex, 6>, 3> z{};
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 3; ++m) {
      z[k][m] = m == k ? 1.0L : 0.0L;
      for (int j = 0; j < 3; ++j) z[k][3 + m] += c[j][k] * std::pow(w[j], m) * std::exp(w[j]);
    }
  std::array<std::array<LComplex, 3>, 3> u{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int col = 0; col < 6; ++col) {
        const Complex e = a(static_cast<std::size_t>(i), static_cast<std::size_t>(col));
        u[i][k] += LComplex(e.real(), e.imag()) * z[k][col];
      }
  return std::abs(u[0][0] * (u[1][1] * u[2][2] - u[1][2] * u[2][1]) -
                  u[0][1] * (u[1][0] * u[2][2] - u[1][2] * u[2][0]) +
                  u[0][2] * (u[1][0] * u[2][1] - u[1][1] * u[2][0]));
}

// Compass search on |Delta| from the long double determinant, shrinking the
// step down to 1e-13. Shares nothing with the Newton polisher.
Complex compass_minimum(const BoundaryMatrix& a, Complex start) {
  auto f = [&](Complex z) { return example_det_long(a, z); };
  Complex best = start;
  long double value = f(best);
  const std::array<Complex, 8> dirs{Complex(1, 0),  Complex(-1, 0), Complex(0, 1),  Complex(0, -1),
                                    Complex(1, 1),  Complex(1, -1), Complex(-1, 1), Complex(-1, -1)};
  for (double h = 1e-3; h > 1e-13;) {
    bool moved = false;
    for (const Complex& d : dirs) {
      const Complex trial = best + h * d;
      const long double v = f(trial);
      if (v < value) {
        value = v;
        best = trial;
        moved = true;
      }
    }
    if (!moved) h *= 0.5;
  }
  return best;
}

bool same_spectrum(const std::vector<Complex>& a, const std::vector<Complex>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a[k] - b[k]) > tol) return false;
  return true;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("region validation") {
    SearchRegion r;
    CHECK_NOTHROW(r.validate());
    r.re_min = 30.0;
    CHECK_THROWS_AS(r.validate(), Error);
    SearchRegion d;
    d.grid_density = 0.0;
    CHECK_THROWS_AS(d.validate(), Error);
    CHECK(SearchRegion{}.contains({0.0, 1.0}));
    CHECK(!SearchRegion{}.contains({0.0, 0.0}));
    CHECK(!SearchRegion{}.contains({26.0, 0.0}));
  }

  TEST_CASE("[I|0] gives Delta = 1 everywhere") {
    std::mt19937_64 rng(51);
    for (int n = 0; n < 200; ++n) {
      const auto p = testsupport::random_problem(rng);
      const Complex lambda = testsupport::box(rng, 10.0);
      if (!lambda_admissible(characteristic_roots(p), lambda)) continue;
      CHECK(std::abs(char_det(p, BoundaryMatrix(), lambda) - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("worked example: the first printed eigenvalue is nearly a zero") {
    const CharacteristicDeterminant f(kExampleP, testsupport::example_matrix());
    CHECK(f({0.46, -0.12}).normalized() <= 1e-2);
    CHECK(f({3.0, 2.0}).normalized() > 1e-2);
  }

  TEST_CASE("expansion equals the direct determinant") {
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> mod(0.1, 3.0);
    std::uniform_real_distribution<double> arg(-3.14159, 3.14159);
    for (int n = 0; n < 300; ++n) {
      const auto p = testsupport::random_problem(rng, 2.0);
      const auto a = testsupport::random_boundary(rng);
      const Complex lambda = std::polar(mod(rng), arg(rng));
      const Complex e = char_det(p, a, lambda);
      const Complex d = char_det_direct(p, a, lambda);
      CHECK(std::abs(e - d) <= 1e-10 * std::abs(d));
    }
  }

  TEST_CASE("evaluation errors name the offending point") {
    const CharacteristicDeterminant f(kExampleP, testsupport::example_matrix());
    CHECK_THROWS_AS(f(0.0), Error);
    const auto batch = f.evaluate(std::vector<Complex>{{1.0, 0.0}, {0.0, 0.0}, {400.0, 0.0}});
    CHECK(batch[0].valid);
    CHECK(!batch[1].valid);
    CHECK(!batch[2].valid);
    CHECK(batch[1].normalized() == 1.0);
    const auto r = characteristic_roots(kExampleP);
    try {
      triple_values(r, std::vector<Complex>{{1.0, 0.0}, {400.0, 0.0}});
      FAIL("range error expected");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Range);
      CHECK(std::string(e.what()).find("400") != std::string::npos);
    }
  }

  TEST_CASE("forward: worked example reproduces all printed eigenvalues") {
    const auto result = find_eigenvalues(kExampleP, testsupport::example_matrix(), SearchRegion{});
    const auto& found = result.spectrum.eigenvalues;
    CHECK(found.size() >= 19);
    for (const Complex& want : testsupport::example_eigenvalues()) {
      CAPTURE(want);
      CHECK(std::any_of(found.begin(), found.end(), [&](Complex z) {
        return std::abs(z.real() - want.real()) <= 0.05 && std::abs(z.imag() - want.imag()) <= 0.05;
      }));
    }
    CHECK(std::is_sorted(found.begin(), found.end(), lexicographic_less));
    const CharacteristicDeterminant f(kExampleP, testsupport::example_matrix());
    for (const Complex& z : found) CHECK(f(z).normalized() <= 1e-10);
    for (std::size_t k = 0; k + 1 < found.size(); ++k) CHECK(std::abs(found[k + 1] - found[k]) > 1e-6);
  }

  TEST_CASE("forward: [I|0] has no eigenvalues") {
    const auto result = find_eigenvalues(kExampleP, BoundaryMatrix(), SearchRegion{});
    CHECK(result.spectrum.eigenvalues.empty());
    CHECK(!result.diagnostics.warnings.empty());
  }

  TEST_CASE("forward: count truncation keeps the sorted prefix") {
    ForwardOptions options;
    options.max_count = 5;
    const auto few = find_eigenvalues(kExampleP, testsupport::example_matrix(), SearchRegion{}, options);
    const auto all = find_eigenvalues(kExampleP, testsupport::example_matrix(), SearchRegion{});
    REQUIRE(few.spectrum.eigenvalues.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) CHECK(few.spectrum.eigenvalues[k] == all.spectrum.eigenvalues[k]);
  }

  TEST_CASE("forward: independent compass-search oracle agrees to 1e-8") {
    std::mt19937_64 rng(53);
    SearchRegion region;
    region.re_min = -8.0;
    region.re_max = 4.0;
    for (int n = 0; n < 5; ++n) {
      const auto a = testsupport::random_boundary(rng);
      const auto result = find_eigenvalues(kExampleP, a, region);
      CHECK(!result.spectrum.eigenvalues.empty());
      for (const Complex& z : result.spectrum.eigenvalues) {
        CAPTURE(z);
        CHECK(std::abs(compass_minimum(a, z + Complex(3e-4, -2e-4)) - z) <= 1e-8);
      }
    }
  }

  TEST_CASE("forward: zeros are invariant under row operations") {
    std::mt19937_64 rng(54);
    for (int n = 0; n < 3; ++n) {
      const auto a = testsupport::random_boundary(rng);
      const auto b = a.row_transform(testsupport::random_invertible3(rng));
      const auto ea = find_eigenvalues(kExampleP, a, SearchRegion{}).spectrum.eigenvalues;
      const auto eb = find_eigenvalues(kExampleP, b, SearchRegion{}).spectrum.eigenvalues;
      CHECK(same_spectrum(ea, eb, 1e-8));
    }
  }

  TEST_CASE("forward: eigenvalues attract a perturbed Newton start") {
    std::mt19937_64 rng(55);
    const auto a = testsupport::random_boundary(rng);
    const auto result = find_eigenvalues(kExampleP, a, SearchRegion{});
    const CharacteristicDeterminant f(kExampleP, a);
    for (const Complex& z : result.spectrum.eigenvalues) {
      const auto again = polish_eigenvalue(f, z + 1e-4);
      CHECK(again.converged);
      CHECK(std::abs(again.lambda - z) <= 1e-6);
    }
  }

  TEST_CASE("forward: identical output for any thread count and backend") {
    std::mt19937_64 rng(56);
    const auto a = testsupport::random_boundary(rng);
    ForwardOptions one;
    one.threads = 1;
    ForwardOptions many;
    many.threads = 7;
    const auto x = find_eigenvalues(kExampleP, a, SearchRegion{}, one).spectrum.eigenvalues;
    const auto y = find_eigenvalues(kExampleP, a, SearchRegion{}, many).spectrum.eigenvalues;
    CHECK(x == y);
    const auto original = kernels::active_backend();
    kernels::set_backend(kernels::Backend::Scalar);
    const auto z = find_eigenvalues(kExampleP, a, SearchRegion{}, many).spectrum.eigenvalues;
    kernels::set_backend(original);
    CHECK(x == z);
  }

  TEST_CASE("forward: problems failing the root conditions still run, with a warning") {
    const ProblemCoefficients bad{-2.0, -1.0, 2.0};
    SearchRegion region;
    region.re_min = -5.0;
    region.re_max = 5.0;
    std::mt19937_64 rng(57);
    const auto result = find_eigenvalues(bad, testsupport::random_boundary(rng), region);
    CHECK(!result.diagnostics.theorem1.all_ok());
    CHECK(!result.diagnostics.warnings.empty());
  }
}
