#include <doctest.h>

#include <cstring>
#include <random>

#include "bcrecon/kernels.hpp"
#include "support.hpp"

using namespace bcrecon;
using namespace bcrecon::kernels;

namespace {

BasisBatch random_batch(std::mt19937_64& rng, std::size_t n, std::vector<ComplexMatrix>& mats) {
  BasisBatch b(n);
  mats.clear();
  std::uniform_real_distribution<double> mag(-30.0, 30.0);
  for (std::size_t p = 0; p < n; ++p) {
    ComplexMatrix w = testsupport::random_matrix(rng, 3, 6);
    // Mixed magnitudes, like exp(r_j) rows at large |lambda|.
    for (std::size_t r = 0; r < 3; ++r) {
      const double s = std::exp(mag(rng));
      for (std::size_t c = 0; c < 6; ++c) w(r, c) *= s;
    }
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 6; ++c) b.set(p, r, c, w(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
    mats.push_back(std::move(w));
  }
  return b;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("triple determinants match the cofactor oracle") {
    std::mt19937_64 rng(41);
    std::vector<ComplexMatrix> mats;
    const auto in = random_batch(rng, 37, mats);
    TripleBatch out(in.count);
    scalar::triple_determinants(in, 0, in.count, out);
    for (std::size_t p = 0; p < in.count; ++p) {
      for (std::size_t t = 0; t < kTripleCount; ++t) {
        const auto& c = kTripleColumns[t];
        const Complex want = testsupport::det3_oracle(mats[p], c[0], c[1], c[2]);
        CHECK(std::abs(out.value(p, t) - want) <= 1e-13 * out.magnitude[t * in.count + p]);
        CHECK(out.magnitude[t * in.count + p] >= std::abs(want) * (1 - 1e-12));
      }
    }
  }

  TEST_CASE("expansion equals the contraction of the triple determinants") {
    std::mt19937_64 rng(42);
    std::vector<ComplexMatrix> mats;
    const auto in = random_batch(rng, 19, mats);
    std::array<Complex, kTripleCount> m{};
    for (auto& v : m) v = testsupport::box(rng);
    const PlanarMinors planar(m);
    TripleBatch tri(in.count);
    ExpansionBatch ex(in.count);
    scalar::triple_determinants(in, 0, in.count, tri);
    scalar::expand_minors(in, planar, 0, in.count, ex);
    for (std::size_t p = 0; p < in.count; ++p) {
      Complex want = 0.0;
      for (std::size_t t = 0; t < kTripleCount; ++t) want += tri.value(p, t) * m[t];
      CHECK(std::abs(Complex(ex.re[p], ex.im[p]) - want) <= 1e-12 * ex.magnitude[p]);
    }
  }

  TEST_CASE("scalar and AVX2 paths are bitwise identical") {
    if (!backend_available(Backend::Avx2)) {
      MESSAGE("AVX2 not available on this machine; nothing to compare");
      return;
    }
    std::mt19937_64 rng(43);
    std::vector<ComplexMatrix> mats;
    for (const std::size_t n : {1u, 3u, 4u, 5u, 17u, 64u, 1001u}) {
      CAPTURE(n);
      const auto in = random_batch(rng, n, mats);
      std::array<Complex, kTripleCount> m{};
      for (auto& v : m) v = testsupport::box(rng);
      const PlanarMinors planar(m);

      TripleBatch ts(n), tv(n);
      scalar::triple_determinants(in, 0, n, ts);
      avx2::triple_determinants(in, 0, n, tv);
      CHECK(bitwise_equal(ts.re, tv.re));
      CHECK(bitwise_equal(ts.im, tv.im));
      CHECK(bitwise_equal(ts.magnitude, tv.magnitude));

      ExpansionBatch es(n), ev(n);
      scalar::expand_minors(in, planar, 0, n, es);
      avx2::expand_minors(in, planar, 0, n, ev);
      CHECK(bitwise_equal(es.re, ev.re));
      CHECK(bitwise_equal(es.im, ev.im));
      CHECK(bitwise_equal(es.magnitude, ev.magnitude));

      // Unaligned sub-ranges leave the rest of the output untouched.
      if (n > 3) {
        ExpansionBatch part(n);
        avx2::expand_minors(in, planar, 1, n - 1, part);
        CHECK(part.re[0] == 0.0);
        CHECK(part.re[n - 1] == 0.0);
        CHECK(std::memcmp(part.re.data() + 1, es.re.data() + 1, (n - 2) * sizeof(double)) == 0);
      }
    }
  }

  TEST_CASE("dispatch: backend selection is observable and reversible") {
    const Backend original = active_backend();
    set_backend(Backend::Scalar);
    CHECK(active_backend() == Backend::Scalar);
    CHECK(std::string(to_string(Backend::Scalar)) == "scalar");
    if (backend_available(Backend::Avx2)) {
      set_backend(Backend::Avx2);
      CHECK(active_backend() == Backend::Avx2);
    }
    set_backend(original);
  }
}
