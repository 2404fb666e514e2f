#include "bcrecon/kernels.hpp"

#include <cmath>

namespace bcrecon::kernels::scalar {

namespace {

struct PointBasis {
  std::array<double, kBasisEntries> re;
  std::array<double, kBasisEntries> im;
  std::array<double, kBasisEntries> mag;  // |re| + |im|, an upper bound on the modulus
};

PointBasis load(const BasisBatch& in, std::size_t point) {
  PointBasis b;
  for (std::size_t e = 0; e < kBasisEntries; ++e) {
    b.re[e] = in.re[e * in.count + point];
    b.im[e] = in.im[e * in.count + point];
    b.mag[e] = std::fabs(b.re[e]) + std::fabs(b.im[e]);
  }
  return b;
}

void triple(const PointBasis& b, std::size_t t, double& vr, double& vi, double& vm) {
  const auto& cols = kTripleColumns[t];
  vr = 0.0;
  vi = 0.0;
  vm = 0.0;
  for (const auto& term : kLeibniz) {
    const int x = cols[term.slot[0]];
    const int y = 6 + cols[term.slot[1]];
    const int z = 12 + cols[term.slot[2]];
    const double xy_re = b.re[x] * b.re[y] - b.im[x] * b.im[y];
    const double xy_im = b.re[x] * b.im[y] + b.im[x] * b.re[y];
    const double t_re = xy_re * b.re[z] - xy_im * b.im[z];
    const double t_im = xy_re * b.im[z] + xy_im * b.re[z];
    if (term.sign > 0) {
      vr = vr + t_re;
      vi = vi + t_im;
    } else {
      vr = vr - t_re;
      vi = vi - t_im;
    }
    vm = vm + (b.mag[x] * b.mag[y]) * b.mag[z];
  }
}

}  // namespace

void triple_determinants(const BasisBatch& in, std::size_t first, std::size_t last, TripleBatch& out) {
  for (std::size_t p = first; p < last; ++p) {
    const PointBasis b = load(in, p);
    for (std::size_t t = 0; t < kTripleCount; ++t) {
      const std::size_t idx = t * out.count + p;
      triple(b, t, out.re[idx], out.im[idx], out.magnitude[idx]);
    }
  }
}

void expand_minors(const BasisBatch& in, const PlanarMinors& minors, std::size_t first,
                   std::size_t last, ExpansionBatch& out) {
  for (std::size_t p = first; p < last; ++p) {
    const PointBasis b = load(in, p);
    double acc_re = 0.0;
    double acc_im = 0.0;
    double acc_mag = 0.0;
    for (std::size_t t = 0; t < kTripleCount; ++t) {
      double vr, vi, vm;
      triple(b, t, vr, vi, vm);
      acc_re = acc_re + (minors.re[t] * vr - minors.im[t] * vi);
      acc_im = acc_im + (minors.re[t] * vi + minors.im[t] * vr);
      acc_mag = acc_mag + minors.magnitude[t] * vm;
    }
    out.re[p] = acc_re;
    out.im[p] = acc_im;
    out.magnitude[p] = acc_mag;
  }
}

}  // namespace bcrecon::kernels::scalar
