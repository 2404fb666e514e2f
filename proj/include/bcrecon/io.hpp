#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bcrecon/charode.hpp"
#include "bcrecon/inverse.hpp"
#include "bcrecon/pluecker.hpp"
#include "bcrecon/spectral.hpp"

namespace bcrecon::io {

using nlohmann::json;

/// Problem file: {"p": [[re, im] x3], "boundary": [[[re, im] x6] x3], "region": {...}}.
struct ProblemSpec {
  ProblemCoefficients p;
  std::optional<BoundaryMatrix> boundary;
  std::optional<SearchRegion> region;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Throws Error(Parse) carrying "origin:line:column" for syntax errors and the
/// offending field path for schema errors.
ProblemSpec parse_problem(std::string_view text, const std::string& origin = "<problem>");
ProblemSpec load_problem(const std::filesystem::path& path);
json problem_to_json(const ProblemSpec& spec);
std::string format_problem(const ProblemSpec& spec);

/// CSV with header `re,im`, 17 significant digits per value.
std::string format_spectrum_csv(std::span<const Complex> eigenvalues);
std::vector<Complex> parse_spectrum_csv(std::string_view text, const std::string& origin = "<spectrum>");
std::vector<Complex> load_spectrum(const std::filesystem::path& path);

/// CSV with header `trial,noise_level,span_distance,status`.
std::string format_perturbation_csv(std::span<const PerturbationRecord> records);
std::vector<PerturbationRecord> parse_perturbation_csv(std::string_view text,
                                                       const std::string& origin = "<study>");

json complex_to_json(Complex z);
Complex complex_from_json(const json& j, const std::string& field);
json matrix_to_json(const BoundaryMatrix& a);
json region_to_json(const SearchRegion& r);
json conditions_to_json(const ConditionReport& c);
ConditionReport conditions_from_json(const json& j);
json settings_to_json(const InversionSettings& s);
InversionSettings settings_from_json(const json& j);

/// The "result" object of an invert / verify report.
json reconstruction_to_json(const ReconstructionReport& r);
ReconstructionReport reconstruction_from_json(const json& j);

/// Boundary forms in readable notation, one line per row:
///   U_1(y) = y(0) + y'(0) + 0.5 y(1) + y''(1) = 0
/// Coefficients below 1e-6 of the row's largest print as zero.
std::vector<std::string> format_boundary_conditions(const BoundaryMatrix& a);

std::string format_double(double v);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace bcrecon::io

namespace bcrecon::io {

/// Structured report written by `invert` and `verify`. Timing is printed to
/// the terminal only, so report files stay byte-identical across runs.
struct RunReport {
  json command;  // {"name": ..., input paths and flags}
  ProblemSpec problem;
  InversionSettings settings;
  std::optional<ReconstructionReport> reconstruction;
  std::optional<double> span_distance;  // verify only
  std::optional<double> verify_threshold;
  std::vector<std::string> warnings;
};

std::string format_report(const RunReport& report);
RunReport parse_report(std::string_view text, const std::string& origin = "<report>");

}  // namespace bcrecon::io
