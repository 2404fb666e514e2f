#include "bcrecon/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bcrecon/error.hpp"
#include "bcrecon/parallel.hpp"

namespace bcrecon {

namespace {

constexpr std::size_t kChunk = 256;
constexpr std::size_t kMaxGridPoints = 20'000'000;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string format(Complex z) {
  std::ostringstream os;
  os.precision(10);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

// Exponential basis W (3x6) of one point: row j is
// (1, r_j, r_j^2, e^{r_j}, e^{r_j} r_j, e^{r_j} r_j^2).
struct PointBasis {
  FundamentalSystem fs;
  std::array<std::array<Complex, 6>, 3> w;
};

PointBasis point_basis(const CharacteristicRoots& roots, Complex lambda) {
  PointBasis b{fundamental_system(roots, lambda), {}};
  for (int j = 0; j < 3; ++j) {
    const Complex r = b.fs.exponents[j];
    const Complex g = std::exp(r);
    b.w[j] = {1.0, r, r * r, g, g * r, g * r * r};
  }
  return b;
}

void store(kernels::BasisBatch& batch, std::size_t point, const PointBasis& b) {
  for (int j = 0; j < 3; ++j)
    for (int c = 0; c < 6; ++c) batch.set(point, j, c, b.w[j][c]);
}

// Product of the row norms of U = A z^T, z = C W.
double row_bound(const ComplexMatrix& a, const PointBasis& b) {
  std::array<std::array<Complex, 6>, 3> z{};
  for (int k = 0; k < 3; ++k)
    for (int c = 0; c < 6; ++c) {
      Complex sum = 0.0;
      for (int j = 0; j < 3; ++j) sum += b.fs.coefficients(k, j) * b.w[j][c];
      z[k][c] = sum;
    }
  double bound = 1.0;
  for (int i = 0; i < 3; ++i) {
    std::array<Complex, 3> row{};
    for (int k = 0; k < 3; ++k) {
      Complex sum = 0.0;
      for (int c = 0; c < 6; ++c) sum += a(i, c) * z[k][c];
      row[k] = sum;
    }
    bound *= norm2(row);
  }
  return bound;
}

}  // namespace

void SearchRegion::validate() const {
  const bool ok = std::isfinite(re_min) && std::isfinite(re_max) && std::isfinite(im_min) &&
                  std::isfinite(im_max) && re_min < re_max && im_min < im_max &&
                  std::isfinite(grid_density) && grid_density > 0.0;
  if (!ok) throw Error(ErrorKind::ContractViolation, "search region needs re_min < re_max, im_min < im_max, density > 0");
  const double points = ((re_max - re_min) * grid_density + 1.0) * ((im_max - im_min) * grid_density + 1.0);
  if (points > static_cast<double>(kMaxGridPoints))
    throw Error(ErrorKind::ContractViolation, "search grid exceeds " + std::to_string(kMaxGridPoints) + " points");
}

bool SearchRegion::contains(Complex z) const {
  return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max &&
         std::abs(z) > kExcludedRadius;
}

double DeterminantSample::normalized() const {
  if (!valid) return 1.0;
  const double s = scale();
  if (!(s > 0.0)) return std::abs(value) == 0.0 ? 0.0 : 1.0;
  return std::min(1.0, std::abs(value) / s);
}

CharacteristicDeterminant::CharacteristicDeterminant(const ProblemCoefficients& p, const BoundaryMatrix& a)
    : CharacteristicDeterminant(characteristic_roots(p), a) {}

CharacteristicDeterminant::CharacteristicDeterminant(const CharacteristicRoots& roots, const BoundaryMatrix& a)
    : roots_(roots), a_(a.coefficients()), minors_(minors_of(a)), planar_(minors_.m) {}

DeterminantSample CharacteristicDeterminant::operator()(Complex lambda) const {
  check_lambda(roots_, lambda);
  const Complex one[] = {lambda};
  return evaluate(one).front();
}

std::vector<DeterminantSample> CharacteristicDeterminant::evaluate(std::span<const Complex> lambdas,
                                                                   std::size_t threads) const {
  std::vector<DeterminantSample> out(lambdas.size());
  std::vector<std::size_t> active;
  active.reserve(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (lambda_admissible(roots_, lambdas[i])) active.push_back(i);

  kernels::BasisBatch batch(active.size());
  kernels::ExpansionBatch expansion(active.size());
  std::vector<Complex> det_c(active.size());
  parallel_chunks(active.size(), kChunk, threads, [&](std::size_t first, std::size_t last) {
    for (std::size_t n = first; n < last; ++n) {
      const std::size_t i = active[n];
      const PointBasis b = point_basis(roots_, lambdas[i]);
      store(batch, n, b);
      det_c[n] = b.fs.coefficient_det;
      out[i].row_bound = row_bound(a_, b);
    }
    kernels::expand_minors(batch, planar_, first, last, expansion);
    for (std::size_t n = first; n < last; ++n) {
      DeterminantSample& s = out[active[n]];
      s.value = det_c[n] * Complex(expansion.re[n], expansion.im[n]);
      s.term_bound = std::abs(det_c[n]) * expansion.magnitude[n];
      s.valid = finite(s.value) && std::isfinite(s.term_bound) && std::isfinite(s.row_bound);
    }
  });
  return out;
}

std::vector<std::array<Complex, kTripleCount>> triple_values(const CharacteristicRoots& roots,
                                                             std::span<const Complex> lambdas,
                                                             std::size_t threads) {
  for (const Complex& l : lambdas) {
    try {
      check_lambda(roots, l);
    } catch (const Error& e) {
      throw Error(e.kind(), "eigenvalue " + format(l) + ": " + e.what());
    }
  }
  kernels::BasisBatch batch(lambdas.size());
  kernels::TripleBatch triples(lambdas.size());
  std::vector<Complex> det_c(lambdas.size());
  parallel_chunks(lambdas.size(), kChunk, threads, [&](std::size_t first, std::size_t last) {
    for (std::size_t n = first; n < last; ++n) {
      const PointBasis b = point_basis(roots, lambdas[n]);
      store(batch, n, b);
      det_c[n] = b.fs.coefficient_det;
    }
    kernels::triple_determinants(batch, first, last, triples);
  });
  std::vector<std::array<Complex, kTripleCount>> out(lambdas.size());
  for (std::size_t n = 0; n < lambdas.size(); ++n)
    for (std::size_t t = 0; t < kTripleCount; ++t) out[n][t] = det_c[n] * triples.value(n, t);
  return out;
}

std::array<Complex, kTripleCount> triple_values(const CharacteristicRoots& roots, Complex lambda) {
  const Complex one[] = {lambda};
  return triple_values(roots, one).front();
}

Complex char_det(const ProblemCoefficients& p, const BoundaryMatrix& a, Complex lambda) {
  return CharacteristicDeterminant(p, a)(lambda).value;
}

Complex char_det_direct(const ProblemCoefficients& p, const BoundaryMatrix& a, Complex lambda) {
  const BoundaryValues bv = boundary_values(p, lambda);
  std::array<std::array<Complex, 3>, 3> u{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      Complex sum = 0.0;
      for (int c = 0; c < 6; ++c) sum += a(i, c) * bv.z(k, c);
      u[i][k] = sum;
    }
  return det3(u);
}

PolishResult polish_eigenvalue(const CharacteristicDeterminant& f, Complex start, double tolerance,
                               int max_iterations, double max_step) {
  constexpr double kStepFloor = 4.0 * std::numeric_limits<double>::epsilon();
  // Central-difference step near cbrt(eps), scaled with |lambda|.
  constexpr double kDiffStep = 6e-6;
  const auto& roots = f.roots();

  PolishResult result{start, false, 0, 1.0};
  if (!lambda_admissible(roots, start)) return result;
  Complex z = start;
  DeterminantSample s = f(z);
  double last_step = std::numeric_limits<double>::infinity();
  bool settled = false;
  for (int it = 1; it <= max_iterations; ++it) {
    result.iterations = it;
    const double h = kDiffStep * std::max(1.0, std::abs(z));
    if (!lambda_admissible(roots, z + h) || !lambda_admissible(roots, z - h)) break;
    const Complex slope = (f(z + h).value - f(z - h).value) / (2.0 * h);
    if (!finite(slope) || slope == Complex{}) break;
    Complex step = s.value / slope;
    if (!finite(step)) break;
    if (std::abs(step) > max_step) step *= max_step / std::abs(step);
    const Complex next = z - step;
    if (!lambda_admissible(roots, next)) break;
    // At the rounding floor the step stops shrinking; keep the better point.
    if (settled && std::abs(step) >= last_step) break;
    const DeterminantSample t = f(next);
    if (settled && !(std::abs(t.value) < std::abs(s.value))) break;
    z = next;
    s = t;
    last_step = std::abs(step);
    const double scale = std::max(1.0, std::abs(z));
    if (last_step <= kStepFloor * scale) break;
    // One extra step once converged; Newton takes it to roundoff.
    if (settled) break;
    if (s.normalized() <= tolerance && last_step <= 1e-9 * scale) settled = true;
  }
  result.lambda = z;
  result.residual = s.normalized();
  result.converged = s.valid && result.residual <= tolerance;
  return result;
}

ForwardResult find_eigenvalues(const ProblemCoefficients& p, const BoundaryMatrix& a,
                               const SearchRegion& region, const ForwardOptions& options) {
  region.validate();
  ForwardResult result;
  result.spectrum.region = region;
  result.spectrum.tolerance = options.tolerance;
  ForwardDiagnostics& diag = result.diagnostics;

  diag.theorem1 = check_theorem1(p);
  if (!diag.theorem1.all_ok())
    diag.warnings.push_back("uniqueness conditions on the characteristic roots / coefficients fail");

  const CharacteristicDeterminant f(diag.theorem1.roots, a);
  const double step = 1.0 / region.grid_density;
  const auto nx = static_cast<std::size_t>(std::floor((region.re_max - region.re_min) * region.grid_density + 1e-9)) + 1;
  const auto ny = static_cast<std::size_t>(std::floor((region.im_max - region.im_min) * region.grid_density + 1e-9)) + 1;
  std::vector<Complex> grid(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix)
      grid[iy * nx + ix] = {region.re_min + static_cast<double>(ix) * step,
                            region.im_min + static_cast<double>(iy) * step};
  diag.grid_points = grid.size();

  const auto samples = f.evaluate(grid, options.threads);
  std::vector<double> level(grid.size(), std::numeric_limits<double>::infinity());
  for (std::size_t n = 0; n < grid.size(); ++n)
    if (samples[n].valid && std::abs(grid[n]) > SearchRegion::kExcludedRadius) level[n] = samples[n].normalized();

  // Local minima over the 8-neighbourhood. Ties go to the first point in
  // row-major order so plateaus seed once.
  std::vector<Complex> seeds;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t n = iy * nx + ix;
      if (!std::isfinite(level[n])) continue;
      bool minimum = true;
      for (int dy = -1; dy <= 1 && minimum; ++dy)
        for (int dx = -1; dx <= 1 && minimum; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const auto jx = static_cast<std::ptrdiff_t>(ix) + dx;
          const auto jy = static_cast<std::ptrdiff_t>(iy) + dy;
          if (jx < 0 || jy < 0 || jx >= static_cast<std::ptrdiff_t>(nx) || jy >= static_cast<std::ptrdiff_t>(ny)) continue;
          const std::size_t m = static_cast<std::size_t>(jy) * nx + static_cast<std::size_t>(jx);
          const bool earlier = m < n;
          if (earlier ? level[m] <= level[n] : level[m] < level[n]) minimum = false;
        }
      if (minimum) seeds.push_back(grid[n]);
    }
  }
  diag.seeds = seeds.size();

  std::vector<PolishResult> polished(seeds.size());
  parallel_chunks(seeds.size(), 1, options.threads, [&](std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i)
      polished[i] = polish_eigenvalue(f, seeds[i], options.tolerance, options.max_newton_iterations, 2.0 * step);
  });

  std::vector<std::pair<Complex, double>> found;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!polished[i].converged) {
      diag.non_converged_seeds.push_back(seeds[i]);
      continue;
    }
    ++diag.converged;
    if (!region.contains(polished[i].lambda)) {
      ++diag.outside_region;
      continue;
    }
    found.emplace_back(polished[i].lambda, polished[i].residual);
  }
  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return lexicographic_less(x.first, y.first); });

  // Seeds converging to the same eigenvalue: keep the best polished copy.
  std::vector<std::pair<Complex, double>> unique;
  for (const auto& [z, residual] : found) {
    auto near = std::find_if(unique.begin(), unique.end(),
                             [&](const auto& k) { return std::abs(k.first - z) <= options.dedup_distance; });
    if (near == unique.end()) {
      unique.emplace_back(z, residual);
      continue;
    }
    ++diag.duplicates_merged;
    if (std::abs(near->first - z) > 1e-9 * std::max(1.0, std::abs(z)) &&
        std::find(diag.clusters.begin(), diag.clusters.end(), near->first) == diag.clusters.end())
      diag.clusters.push_back(near->first);
    if (residual < near->second) *near = {z, residual};
  }
  auto& kept = result.spectrum.eigenvalues;
  for (const auto& u : unique) kept.push_back(u.first);
  sort_lexicographic(kept);
  if (kept.size() > options.max_count) kept.resize(options.max_count);
  if (!diag.clusters.empty())
    diag.warnings.push_back(std::to_string(diag.clusters.size()) + " possible multiple eigenvalue(s) reported once");
  if (kept.empty()) diag.warnings.push_back("no eigenvalues found in the search region");
  return result;
}

}  // namespace bcrecon
