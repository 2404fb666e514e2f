// Compiled with -mavx2; only reached after a runtime CPU check.
#include "bcrecon/kernels.hpp"

#include <immintrin.h>

namespace bcrecon::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

struct LaneBasis {
  __m256d re[kBasisEntries];
  __m256d im[kBasisEntries];
  __m256d mag[kBasisEntries];
};

inline __m256d vabs(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

inline void load(const BasisBatch& in, std::size_t point, LaneBasis& b) {
  for (std::size_t e = 0; e < kBasisEntries; ++e) {
    b.re[e] = _mm256_loadu_pd(&in.re[e * in.count + point]);
    b.im[e] = _mm256_loadu_pd(&in.im[e * in.count + point]);
    b.mag[e] = _mm256_add_pd(vabs(b.re[e]), vabs(b.im[e]));
  }
}

inline void triple(const LaneBasis& b, std::size_t t, __m256d& vr, __m256d& vi, __m256d& vm) {
  const auto& cols = kTripleColumns[t];
  vr = _mm256_setzero_pd();
  vi = _mm256_setzero_pd();
  vm = _mm256_setzero_pd();
  for (const auto& term : kLeibniz) {
    const int x = cols[term.slot[0]];
    const int y = 6 + cols[term.slot[1]];
    const int z = 12 + cols[term.slot[2]];
    const __m256d xy_re = _mm256_sub_pd(_mm256_mul_pd(b.re[x], b.re[y]), _mm256_mul_pd(b.im[x], b.im[y]));
    const __m256d xy_im = _mm256_add_pd(_mm256_mul_pd(b.re[x], b.im[y]), _mm256_mul_pd(b.im[x], b.re[y]));
    const __m256d t_re = _mm256_sub_pd(_mm256_mul_pd(xy_re, b.re[z]), _mm256_mul_pd(xy_im, b.im[z]));
    const __m256d t_im = _mm256_add_pd(_mm256_mul_pd(xy_re, b.im[z]), _mm256_mul_pd(xy_im, b.re[z]));
    if (term.sign > 0) {
      vr = _mm256_add_pd(vr, t_re);
      vi = _mm256_add_pd(vi, t_im);
    } else {
      vr = _mm256_sub_pd(vr, t_re);
      vi = _mm256_sub_pd(vi, t_im);
    }
    vm = _mm256_add_pd(vm, _mm256_mul_pd(_mm256_mul_pd(b.mag[x], b.mag[y]), b.mag[z]));
  }
}

}  // namespace

void triple_determinants(const BasisBatch& in, std::size_t first, std::size_t last, TripleBatch& out) {
  std::size_t p = first;
  LaneBasis b;
  for (; p + kLanes <= last; p += kLanes) {
    load(in, p, b);
    for (std::size_t t = 0; t < kTripleCount; ++t) {
      __m256d vr, vi, vm;
      triple(b, t, vr, vi, vm);
      const std::size_t idx = t * out.count + p;
      _mm256_storeu_pd(&out.re[idx], vr);
      _mm256_storeu_pd(&out.im[idx], vi);
      _mm256_storeu_pd(&out.magnitude[idx], vm);
    }
  }
  scalar::triple_determinants(in, p, last, out);
}

void expand_minors(const BasisBatch& in, const PlanarMinors& minors, std::size_t first,
                   std::size_t last, ExpansionBatch& out) {
  std::size_t p = first;
  LaneBasis b;
  for (; p + kLanes <= last; p += kLanes) {
    load(in, p, b);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    __m256d acc_mag = _mm256_setzero_pd();
    for (std::size_t t = 0; t < kTripleCount; ++t) {
      __m256d vr, vi, vm;
      triple(b, t, vr, vi, vm);
      const __m256d mr = _mm256_set1_pd(minors.re[t]);
      const __m256d mi = _mm256_set1_pd(minors.im[t]);
      acc_re = _mm256_add_pd(acc_re, _mm256_sub_pd(_mm256_mul_pd(mr, vr), _mm256_mul_pd(mi, vi)));
      acc_im = _mm256_add_pd(acc_im, _mm256_add_pd(_mm256_mul_pd(mr, vi), _mm256_mul_pd(mi, vr)));
      acc_mag = _mm256_add_pd(acc_mag, _mm256_mul_pd(_mm256_set1_pd(minors.magnitude[t]), vm));
    }
    _mm256_storeu_pd(&out.re[p], acc_re);
    _mm256_storeu_pd(&out.im[p], acc_im);
    _mm256_storeu_pd(&out.magnitude[p], acc_mag);
  }
  scalar::expand_minors(in, minors, p, last, out);
}

}  // namespace bcrecon::kernels::avx2
