#include "bcrecon/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string_view>

namespace bcrecon::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(BCRECON_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("BCRECON_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") return Backend::Scalar;
    if (v == "avx2" && cpu_has_avx2()) return Backend::Avx2;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& selected() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

PlanarMinors::PlanarMinors(const std::array<Complex, kTripleCount>& m) {
  for (std::size_t t = 0; t < kTripleCount; ++t) {
    re[t] = m[t].real();
    im[t] = m[t].imag();
    magnitude[t] = std::fabs(re[t]) + std::fabs(im[t]);
  }
}

const char* to_string(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend backend) {
  return backend == Backend::Scalar || cpu_has_avx2();
}

Backend active_backend() { return selected().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  selected().store(backend_available(backend) ? backend : Backend::Scalar, std::memory_order_relaxed);
}

void triple_determinants(const BasisBatch& in, std::size_t first, std::size_t last, TripleBatch& out) {
#if defined(BCRECON_HAVE_AVX2)
  if (active_backend() == Backend::Avx2) return avx2::triple_determinants(in, first, last, out);
#endif
  scalar::triple_determinants(in, first, last, out);
}

void expand_minors(const BasisBatch& in, const PlanarMinors& minors, std::size_t first,
                   std::size_t last, ExpansionBatch& out) {
#if defined(BCRECON_HAVE_AVX2)
  if (active_backend() == Backend::Avx2) return avx2::expand_minors(in, minors, first, last, out);
#endif
  scalar::expand_minors(in, minors, first, last, out);
}

#if !defined(BCRECON_HAVE_AVX2)
namespace avx2 {
void triple_determinants(const BasisBatch& in, std::size_t first, std::size_t last, TripleBatch& out) {
  scalar::triple_determinants(in, first, last, out);
}
void expand_minors(const BasisBatch& in, const PlanarMinors& minors, std::size_t first,
                   std::size_t last, ExpansionBatch& out) {
  scalar::expand_minors(in, minors, first, last, out);
}
}  // namespace avx2
#endif

}  // namespace bcrecon::kernels
