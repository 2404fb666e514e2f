#include "bcrecon/commands.hpp"

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bcrecon/error.hpp"
#include "bcrecon/inverse.hpp"
#include "bcrecon/io.hpp"
#include "bcrecon/spectral.hpp"

namespace bcrecon {

namespace {

constexpr double kVerifyThreshold = 1e-6;

struct Flags {
  std::string problem;
  std::string spectrum;
  std::string out;
  std::vector<double> region;
  std::size_t count = 1000;
  std::optional<double> grid;
  double noise = 0.0;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  double rank_gap_threshold = InversionSettings{}.rank_gap_threshold;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string complex_text(Complex z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.10g%+.10gi", z.real(), z.imag());
  return buf;
}

SearchRegion resolve_region(const Flags& flags, const io::ProblemSpec& spec) {
  SearchRegion r = spec.region.value_or(SearchRegion{});
  if (flags.region.size() == 4) {
    r.re_min = flags.region[0];
    r.re_max = flags.region[1];
    r.im_min = flags.region[2];
    r.im_max = flags.region[3];
  }
  if (flags.grid) r.grid_density = *flags.grid;
  try {
    r.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, std::string("region: ") + e.what());
  }
  return r;
}

InversionSettings resolve_settings(const Flags& flags) {
  InversionSettings s;
  s.rank_gap_threshold = flags.rank_gap_threshold;
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, std::string("--rank-gap-threshold: ") + e.what());
  }
  return s;
}

std::string region_text(const SearchRegion& r) {
  return "[" + fmt("%g", r.re_min) + ", " + fmt("%g", r.re_max) + "] x [" + fmt("%g", r.im_min) + ", " +
         fmt("%g", r.im_max) + "], grid density " + fmt("%g", r.grid_density);
}

io::json region_echo(const SearchRegion& r) { return io::region_to_json(r); }

std::vector<std::string> reconstruction_warnings(const ReconstructionReport& r) {
  std::vector<std::string> w;
  if (r.non_unique)
    w.push_back("rank gap " + fmt("%.3g", r.rank_gap) + " below threshold " +
                fmt("%.3g", r.settings.rank_gap_threshold) + ": the boundary conditions may not be unique");
  if (!r.theorem1.all_ok()) w.push_back("uniqueness conditions on the characteristic roots are not met");
  return w;
}

void print_reconstruction(const ReconstructionReport& r, std::ostream& out) {
  out << "eigenvalues used: " << r.eigenvalues.size() << "\n";
  out << "pivot minor: M_" << r.pivot_used.label() << "\n";
  out << "rank gap: " << fmt("%.6g", r.rank_gap) << "\n";
  out << "reconstructed boundary conditions:\n";
  for (const auto& line : io::format_boundary_conditions(r.matrix)) out << "  " << line << "\n";
}

int cmd_roots(const Flags& flags, std::ostream& out) {
  const auto spec = io::load_problem(flags.problem);
  ConditionReport report;
  try {
    report = check_theorem1(spec.p);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::RepeatedRoots) throw;
    out << "characteristic roots are repeated: " << e.what() << "\n";
    return kExitPrecondition;
  }
  out << "characteristic roots:\n";
  for (std::size_t i = 0; i < 3; ++i) out << "  omega_" << i + 1 << " = " << complex_text(report.roots.omega[i]) << "\n";
  out << "signed subset sums (tolerance " << fmt("%g", report.tolerance_used) << "):\n";
  for (const auto& c : report.checks) {
    std::string expr;
    for (std::size_t k = 0; k < c.members.size(); ++k) {
      expr += (c.signs[k] > 0 ? (k == 0 ? "" : " + ") : (k == 0 ? "-" : " - "));
      expr += "w" + std::to_string(c.members[k]);
    }
    char line[160];
    std::snprintf(line, sizeof line, "  %-16s |sum| = %-12.6g %s\n", expr.c_str(), std::abs(c.value),
                  c.ok ? "ok" : "FAIL");
    out << line;
  }
  out << "  p1 != 0: " << (report.p1_nonzero ? "ok" : "FAIL") << "\n";
  out << "  p2 != 0: " << (report.p2_nonzero ? "ok" : "FAIL") << "\n";
  out << "  p3 != 0: " << (report.p3_nonzero ? "ok" : "FAIL") << "\n";
  if (report.violating_combination) {
    const auto& v = *report.violating_combination;
    out << "violation: members";
    for (int m : v.members) out << " " << m;
    out << ", signs";
    for (int s : v.signs) out << (s > 0 ? " +" : " -");
    out << "\n";
  }
  if (!flags.out.empty()) io::write_file(flags.out, io::conditions_to_json(report).dump(2) + "\n");
  out << (report.all_ok() ? "all conditions hold\n" : "conditions violated\n");
  return report.all_ok() ? kExitOk : kExitPrecondition;
}

int cmd_forward(const Flags& flags, std::ostream& out, std::ostream& err) {
  const auto spec = io::load_problem(flags.problem);
  if (!spec.boundary) {
    err << "error: problem file has no boundary matrix\n";
    return kExitPrecondition;
  }
  const SearchRegion region = resolve_region(flags, spec);
  ForwardOptions options;
  options.max_count = flags.count;
  const Stopwatch clock;
  ForwardResult result;
  try {
    result = find_eigenvalues(spec.p, *spec.boundary, region, options);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  io::write_file(flags.out, io::format_spectrum_csv(result.spectrum.eigenvalues));
  for (const auto& w : result.diagnostics.warnings) err << "warning: " << w << "\n";
  if (result.spectrum.eigenvalues.empty()) err << "warning: no eigenvalues found in the region\n";
  out << "eigenvalues: " << result.spectrum.eigenvalues.size() << "\n";
  out << "region: " << region_text(region) << "\n";
  out << "elapsed: " << fmt("%.3f", clock.seconds()) << " s\n";
  return kExitOk;
}

int map_inverse_error(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  switch (e.kind()) {
    case ErrorKind::Parse: throw e;
    case ErrorKind::TooFewEigenvalues: return kExitPrecondition;
    case ErrorKind::InconsistentMinors: return kExitInconsistent;
    default: return kExitNumerical;
  }
}

int cmd_invert(const Flags& flags, std::ostream& out, std::ostream& err) {
  const auto spec = io::load_problem(flags.problem);
  const auto eigenvalues = io::load_spectrum(flags.spectrum);
  const InversionSettings settings = resolve_settings(flags);
  const Stopwatch clock;
  ReconstructionReport result;
  try {
    result = invert_spectrum(spec.p, eigenvalues, settings);
  } catch (const Error& e) {
    return map_inverse_error(e, err);
  }
  io::RunReport report;
  report.command = {{"name", "invert"}, {"problem", flags.problem}, {"spectrum", flags.spectrum}};
  report.problem = spec;
  report.settings = settings;
  report.warnings = reconstruction_warnings(result);
  report.reconstruction = std::move(result);
  io::write_file(flags.out, io::format_report(report));
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  print_reconstruction(*report.reconstruction, out);
  out << "elapsed: " << fmt("%.3f", clock.seconds()) << " s\n";
  return kExitOk;
}

int cmd_verify(const Flags& flags, std::ostream& out, std::ostream& err) {
  const auto spec = io::load_problem(flags.problem);
  if (!spec.boundary) {
    err << "error: problem file has no boundary matrix\n";
    return kExitPrecondition;
  }
  const SearchRegion region = resolve_region(flags, spec);
  const InversionSettings settings = resolve_settings(flags);
  ForwardOptions options;
  options.max_count = flags.count;
  const Stopwatch clock;
  ForwardResult forward;
  try {
    forward = find_eigenvalues(spec.p, *spec.boundary, region, options);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  const auto& eigenvalues = forward.spectrum.eigenvalues;
  out << "forward: " << eigenvalues.size() << " eigenvalues in " << region_text(region) << "\n";
  if (eigenvalues.size() < settings.minimum_eigenvalues) {
    err << "error: " << (eigenvalues.empty() ? "no eigenvalues" : "too few eigenvalues") << " in the region ("
        << eigenvalues.size() << ", need " << settings.minimum_eigenvalues << ")\n";
    return kExitPrecondition;
  }
  ReconstructionReport result;
  try {
    result = invert_spectrum(spec.p, eigenvalues, settings);
  } catch (const Error& e) {
    return map_inverse_error(e, err);
  }
  const double distance = span_distance(result.matrix, *spec.boundary);
  const bool pass = distance <= kVerifyThreshold;
  print_reconstruction(result, out);
  out << "span distance: " << fmt("%.3e", distance) << " (threshold " << fmt("%g", kVerifyThreshold) << ")\n";
  out << (pass ? "PASS" : "FAIL") << "\n";
  out << "elapsed: " << fmt("%.3f", clock.seconds()) << " s\n";
  if (!flags.out.empty()) {
    io::RunReport report;
    report.command = {{"name", "verify"}, {"problem", flags.problem}, {"region", region_echo(region)},
                      {"count", flags.count}};
    report.problem = spec;
    report.settings = settings;
    report.warnings = forward.diagnostics.warnings;
    for (auto& w : reconstruction_warnings(result)) report.warnings.push_back(std::move(w));
    report.reconstruction = std::move(result);
    report.span_distance = distance;
    report.verify_threshold = kVerifyThreshold;
    io::write_file(flags.out, io::format_report(report));
  }
  return pass ? kExitOk : kExitVerifyFailed;
}

int cmd_perturb(const Flags& flags, std::ostream& out, std::ostream& err) {
  const auto spec = io::load_problem(flags.problem);
  if (!spec.boundary) {
    err << "error: problem file has no boundary matrix\n";
    return kExitPrecondition;
  }
  if (!(flags.noise >= 0.0) || !std::isfinite(flags.noise)) throw Error(ErrorKind::Parse, "--noise must be >= 0");
  const SearchRegion region = resolve_region(flags, spec);
  const InversionSettings settings = resolve_settings(flags);
  const Stopwatch clock;
  std::vector<PerturbationRecord> records;
  try {
    records = perturbation_study(spec.p, *spec.boundary, region, flags.noise, flags.trials, flags.seed, settings);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  io::write_file(flags.out, io::format_perturbation_csv(records));
  std::size_t ok = 0;
  double worst = 0.0;
  for (const auto& r : records) {
    if (r.status == "ok") ++ok;
    if (std::isfinite(r.span_distance)) worst = std::max(worst, r.span_distance);
  }
  out << "trials: " << records.size() << ", ok: " << ok << ", largest span distance: " << fmt("%.3e", worst) << "\n";
  out << "elapsed: " << fmt("%.3f", clock.seconds()) << " s\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reconstruct non-separated boundary conditions of a third-order ODE from its spectrum"};
  app.require_subcommand(1, 1);
  Flags flags;

  auto problem_opt = [&](CLI::App* sub) {
    sub->add_option("--problem", flags.problem, "Problem file (JSON)")->required();
  };
  auto region_opts = [&](CLI::App* sub) {
    sub->add_option("--region", flags.region, "Search rectangle: re_min re_max im_min im_max")->expected(4);
    sub->add_option("--grid", flags.grid, "Grid samples per unit length");
    sub->add_option("--count", flags.count, "Maximum number of eigenvalues")->check(CLI::PositiveNumber);
  };
  auto gap_opt = [&](CLI::App* sub) {
    sub->add_option("--rank-gap-threshold", flags.rank_gap_threshold, "Warn below this singular value ratio");
  };

  auto* roots = app.add_subcommand("roots", "Characteristic roots and uniqueness conditions");
  problem_opt(roots);
  roots->add_option("--out", flags.out, "Optional JSON copy of the check table");

  auto* forward = app.add_subcommand("forward", "Eigenvalues of a problem with known boundary matrix");
  problem_opt(forward);
  region_opts(forward);
  forward->add_option("--out", flags.out, "Spectrum CSV")->required();

  auto* invert = app.add_subcommand("invert", "Reconstruct the boundary matrix from a spectrum");
  problem_opt(invert);
  invert->add_option("--spectrum", flags.spectrum, "Spectrum CSV")->required();
  invert->add_option("--out", flags.out, "Report file (JSON)")->required();
  gap_opt(invert);

  auto* verify = app.add_subcommand("verify", "Forward then inverse, compare with the input matrix");
  problem_opt(verify);
  region_opts(verify);
  gap_opt(verify);
  verify->add_option("--out", flags.out, "Optional report file (JSON)");

  auto* perturb = app.add_subcommand("perturb", "Reconstruction under noisy eigenvalues");
  problem_opt(perturb);
  region_opts(perturb);
  gap_opt(perturb);
  perturb->add_option("--noise", flags.noise, "Noise level sigma, E|dz|^2 = sigma^2");
  perturb->add_option("--trials", flags.trials, "Number of trials");
  perturb->add_option("--seed", flags.seed, "Random seed");
  perturb->add_option("--out", flags.out, "Study CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }

  try {
    if (*roots) return cmd_roots(flags, out);
    if (*forward) return cmd_forward(flags, out, err);
    if (*invert) return cmd_invert(flags, out, err);
    if (*verify) return cmd_verify(flags, out, err);
    return cmd_perturb(flags, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Parse ? kExitParse : kExitNumerical;
  }
}

}  // namespace bcrecon
