#include "bcrecon/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "bcrecon/error.hpp"

namespace bcrecon::io {

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorKind::Parse, message); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Splits into lines, dropping one trailing empty line.
std::vector<std::string_view> lines_of(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

double number_field(const json& j, const std::string& field) {
  if (!j.is_number()) fail("field '" + field + "': expected a number");
  return j.get<double>();
}

const json& member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail("field '" + path + "': missing");
  return j.at(key);
}

SearchRegion region_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail("field '" + path + "': expected an object");
  SearchRegion r;
  r.re_min = number_field(member(j, "re_min", path + ".re_min"), path + ".re_min");
  r.re_max = number_field(member(j, "re_max", path + ".re_max"), path + ".re_max");
  r.im_min = number_field(member(j, "im_min", path + ".im_min"), path + ".im_min");
  r.im_max = number_field(member(j, "im_max", path + ".im_max"), path + ".im_max");
  if (j.contains("grid_density")) r.grid_density = number_field(j.at("grid_density"), path + ".grid_density");
  try {
    r.validate();
  } catch (const Error& e) {
    fail("field '" + path + "': " + e.what());
  }
  return r;
}

BoundaryMatrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail("field '" + path + "': expected 3 rows");
  ComplexMatrix a(3, 6);
  for (std::size_t r = 0; r < 3; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != 6) fail("field '" + row_path + "': expected 6 complex entries");
    for (std::size_t c = 0; c < 6; ++c)
      a(r, c) = complex_from_json(j[r][c], row_path + "[" + std::to_string(c) + "]");
  }
  try {
    return BoundaryMatrix(std::move(a));
  } catch (const Error& e) {
    fail("field '" + path + "': " + e.what());
  }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j, const std::string& field) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return number_field(j, field);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::ContractViolation, path.string() + ": cannot write file");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::ContractViolation, path.string() + ": write failed");
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail("field '" + field + "': expected a complex number [re, im]");
  const Complex z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail("field '" + field + "': not finite");
  return z;
}

json matrix_to_json(const BoundaryMatrix& a) {
  json rows = json::array();
  for (std::size_t r = 0; r < 3; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < 6; ++c) row.push_back(complex_to_json(a(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json region_to_json(const SearchRegion& r) {
  return {{"re_min", r.re_min}, {"re_max", r.re_max}, {"im_min", r.im_min}, {"im_max", r.im_max},
          {"grid_density", r.grid_density}};
}

ProblemSpec parse_problem(std::string_view text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    fail(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": malformed JSON");
  }
  try {
    if (!doc.is_object()) fail("document must be an object");
    const json& p = member(doc, "p", "p");
    if (!p.is_array() || p.size() != 3) fail("field 'p': expected an array of 3 complex numbers [re, im]");
    ProblemSpec spec;
    spec.p = {complex_from_json(p[0], "p[0]"), complex_from_json(p[1], "p[1]"), complex_from_json(p[2], "p[2]")};
    if (doc.contains("boundary") && !doc.at("boundary").is_null())
      spec.boundary = matrix_from_json(doc.at("boundary"), "boundary");
    if (doc.contains("region") && !doc.at("region").is_null())
      spec.region = region_from_json(doc.at("region"), "region");
    return spec;
  } catch (const Error& e) {
    fail(origin + ": " + e.what());
  }
}

ProblemSpec load_problem(const std::filesystem::path& path) {
  return parse_problem(read_file(path), path.string());
}

json problem_to_json(const ProblemSpec& spec) {
  json doc = {{"p", json::array({complex_to_json(spec.p.p1), complex_to_json(spec.p.p2), complex_to_json(spec.p.p3)})}};
  if (spec.boundary) doc["boundary"] = matrix_to_json(*spec.boundary);
  if (spec.region) doc["region"] = region_to_json(*spec.region);
  return doc;
}

std::string format_problem(const ProblemSpec& spec) { return problem_to_json(spec).dump(2) + "\n"; }

std::string format_spectrum_csv(std::span<const Complex> eigenvalues) {
  std::string out = "re,im\n";
  for (const Complex& z : eigenvalues) out += format_double(z.real()) + "," + format_double(z.imag()) + "\n";
  return out;
}

std::vector<Complex> parse_spectrum_csv(std::string_view text, const std::string& origin) {
  const auto lines = lines_of(text);
  if (lines.empty() || trim(lines[0]) != "re,im") fail(origin + ":1: expected header 're,im'");
  std::vector<Complex> out;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto fields = split(lines[n], ',');
    const auto re = fields.size() == 2 ? parse_number(fields[0]) : std::nullopt;
    const auto im = fields.size() == 2 ? parse_number(fields[1]) : std::nullopt;
    if (!re || !im || !std::isfinite(*re) || !std::isfinite(*im))
      fail(origin + ":" + std::to_string(n + 1) + ": expected two finite numbers 're,im'");
    out.emplace_back(*re, *im);
  }
  return out;
}

std::vector<Complex> load_spectrum(const std::filesystem::path& path) {
  return parse_spectrum_csv(read_file(path), path.string());
}

std::string format_perturbation_csv(std::span<const PerturbationRecord> records) {
  std::string out = "trial,noise_level,span_distance,status\n";
  for (const auto& r : records)
    out += std::to_string(r.trial) + "," + format_double(r.noise_level) + "," +
           (std::isfinite(r.span_distance) ? format_double(r.span_distance) : std::string("nan")) + "," +
           r.status + "\n";
  return out;
}

std::vector<PerturbationRecord> parse_perturbation_csv(std::string_view text, const std::string& origin) {
  const auto lines = lines_of(text);
  if (lines.empty() || trim(lines[0]) != "trial,noise_level,span_distance,status")
    fail(origin + ":1: expected header 'trial,noise_level,span_distance,status'");
  std::vector<PerturbationRecord> out;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto fields = split(lines[n], ',');
    const std::string where = origin + ":" + std::to_string(n + 1);
    if (fields.size() != 4) fail(where + ": expected 4 fields");
    const auto trial = parse_number(fields[0]);
    const auto noise = parse_number(fields[1]);
    const auto dist = parse_number(fields[2]);
    if (!trial || !noise || !dist || *trial < 0) fail(where + ": malformed record");
    out.push_back({static_cast<std::size_t>(*trial), *noise, *dist, std::string(trim(fields[3]))});
  }
  return out;
}

json conditions_to_json(const ConditionReport& c) {
  json checks = json::array();
  for (const auto& k : c.checks)
    checks.push_back({{"members", k.members}, {"signs", k.signs}, {"value", complex_to_json(k.value)}, {"ok", k.ok}});
  json roots = json::array();
  for (const auto& w : c.roots.omega) roots.push_back(complex_to_json(w));
  json violating = nullptr;
  if (c.violating_combination)
    violating = {{"members", c.violating_combination->members},
                 {"signs", c.violating_combination->signs},
                 {"value", complex_to_json(c.violating_combination->value)}};
  return {{"roots", roots},
          {"tolerance", c.tolerance_used},
          {"condition1_ok", c.condition1_ok},
          {"violating_combination", violating},
          {"p1_nonzero", c.p1_nonzero},
          {"p2_nonzero", c.p2_nonzero},
          {"p3_nonzero", c.p3_nonzero},
          {"checks", checks}};
}

ConditionReport conditions_from_json(const json& j) {
  ConditionReport c;
  const json& roots = member(j, "roots", "theorem1.roots");
  if (!roots.is_array() || roots.size() != 3) fail("field 'theorem1.roots': expected 3 roots");
  for (std::size_t i = 0; i < 3; ++i) c.roots.omega[i] = complex_from_json(roots[i], "theorem1.roots");
  c.tolerance_used = number_field(member(j, "tolerance", "theorem1.tolerance"), "theorem1.tolerance");
  c.condition1_ok = member(j, "condition1_ok", "theorem1.condition1_ok").get<bool>();
  c.p1_nonzero = member(j, "p1_nonzero", "theorem1.p1_nonzero").get<bool>();
  c.p2_nonzero = member(j, "p2_nonzero", "theorem1.p2_nonzero").get<bool>();
  c.p3_nonzero = member(j, "p3_nonzero", "theorem1.p3_nonzero").get<bool>();
  for (const auto& k : member(j, "checks", "theorem1.checks")) {
    SignedSubsetCheck check;
    check.members = k.at("members").get<std::vector<int>>();
    check.signs = k.at("signs").get<std::vector<int>>();
    check.value = complex_from_json(k.at("value"), "theorem1.checks.value");
    check.ok = k.at("ok").get<bool>();
    c.checks.push_back(std::move(check));
  }
  const json& v = member(j, "violating_combination", "theorem1.violating_combination");
  if (!v.is_null()) {
    SignedSubsetCheck check;
    check.members = v.at("members").get<std::vector<int>>();
    check.signs = v.at("signs").get<std::vector<int>>();
    check.value = complex_from_json(v.at("value"), "theorem1.violating_combination.value");
    check.ok = false;
    c.violating_combination = std::move(check);
  }
  return c;
}

json settings_to_json(const InversionSettings& s) {
  return {{"rank_gap_threshold", s.rank_gap_threshold},
          {"consistency_tolerance", s.consistency_tolerance},
          {"minimum_eigenvalues", s.minimum_eigenvalues}};
}

InversionSettings settings_from_json(const json& j) {
  InversionSettings s;
  s.rank_gap_threshold = number_field(member(j, "rank_gap_threshold", "settings"), "settings.rank_gap_threshold");
  s.consistency_tolerance =
      number_field(member(j, "consistency_tolerance", "settings"), "settings.consistency_tolerance");
  s.minimum_eigenvalues = member(j, "minimum_eigenvalues", "settings").get<std::size_t>();
  return s;
}

json reconstruction_to_json(const ReconstructionReport& r) {
  json minors = json::object();
  for (std::size_t t = 0; t < kTripleCount; ++t) minors[TripleIndex::at(t).label()] = complex_to_json(r.minors[t]);
  json eigenvalues = json::array();
  for (const auto& z : r.eigenvalues) eigenvalues.push_back(complex_to_json(z));
  json residuals = json::array();
  for (double v : r.residuals) residuals.push_back(number_or_null(v));
  return {{"eigenvalues", eigenvalues},
          {"minors", minors},
          {"pivot", r.pivot_used.label()},
          {"matrix", matrix_to_json(r.matrix)},
          {"boundary_conditions", format_boundary_conditions(r.matrix)},
          {"singular_values", r.singular_values},
          {"rank_gap", number_or_null(r.rank_gap)},
          {"non_unique", r.non_unique},
          {"residuals", residuals},
          {"theorem1", conditions_to_json(r.theorem1)},
          {"settings", settings_to_json(r.settings)}};
}

ReconstructionReport reconstruction_from_json(const json& j) {
  try {
    ReconstructionReport r;
    for (const auto& z : member(j, "eigenvalues", "eigenvalues")) r.eigenvalues.push_back(complex_from_json(z, "eigenvalues"));
    const json& minors = member(j, "minors", "minors");
    for (std::size_t t = 0; t < kTripleCount; ++t) {
      const std::string label = TripleIndex::at(t).label();
      r.minors[t] = complex_from_json(member(minors, label.c_str(), "minors." + label), "minors." + label);
    }
    const auto pivot = TripleIndex::parse(member(j, "pivot", "pivot").get<std::string>());
    if (!pivot) fail("field 'pivot': not a column triple");
    r.pivot_used = *pivot;
    r.matrix = matrix_from_json(member(j, "matrix", "matrix"), "matrix");
    for (const auto& v : member(j, "singular_values", "singular_values"))
      r.singular_values.push_back(number_field(v, "singular_values"));
    r.rank_gap = number_or_nan(member(j, "rank_gap", "rank_gap"), "rank_gap");
    r.non_unique = member(j, "non_unique", "non_unique").get<bool>();
    for (const auto& v : member(j, "residuals", "residuals")) r.residuals.push_back(number_or_nan(v, "residuals"));
    r.theorem1 = conditions_from_json(member(j, "theorem1", "theorem1"));
    r.settings = settings_from_json(member(j, "settings", "settings"));
    return r;
  } catch (const json::exception& e) {
    fail(std::string("malformed report: ") + e.what());
  }
}

std::vector<std::string> format_boundary_conditions(const BoundaryMatrix& a) {
  static constexpr const char* kSymbols[6] = {"y(0)", "y'(0)", "y''(0)", "y(1)", "y'(1)", "y''(1)"};
  std::vector<std::string> lines;
  for (std::size_t r = 0; r < 3; ++r) {
    double largest = 0.0;
    for (std::size_t c = 0; c < 6; ++c) largest = std::max(largest, std::abs(a(r, c)));
    const double cut = 1e-6 * largest;
    std::string line = "U_" + std::to_string(r + 1) + "(y) =";
    bool first = true;
    for (std::size_t c = 0; c < 6; ++c) {
      const Complex v = a(r, c);
      if (std::abs(v) < cut) continue;
      double re = std::abs(v.real()) < cut ? 0.0 : v.real();
      double im = std::abs(v.imag()) < cut ? 0.0 : v.imag();
      char buf[96];
      std::string coef;
      bool negative = false;
      if (im == 0.0) {
        negative = re < 0.0;
        std::snprintf(buf, sizeof buf, "%.6g", std::abs(re));
        if (std::string_view(buf) != "1") coef = std::string(buf) + " ";
      } else if (re == 0.0) {
        negative = im < 0.0;
        std::snprintf(buf, sizeof buf, "%.6gi ", std::abs(im));
        coef = buf;
      } else {
        std::snprintf(buf, sizeof buf, "(%.6g%+.6gi) ", re, im);
        coef = buf;
      }
      if (first) {
        line += negative ? " -" : " ";
      } else {
        line += negative ? " - " : " + ";
      }
      line += coef + kSymbols[c];
      first = false;
    }
    line += " = 0";
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace bcrecon::io

namespace bcrecon::io {

std::string format_report(const RunReport& report) {
  json doc = {{"format", "bcrecon-report"},
              {"version", 1},
              {"command", report.command},
              {"problem", problem_to_json(report.problem)},
              {"settings", settings_to_json(report.settings)},
              {"warnings", report.warnings}};
  doc["result"] = report.reconstruction ? reconstruction_to_json(*report.reconstruction) : json(nullptr);
  if (report.span_distance) {
    doc["verification"] = {{"span_distance", number_or_null(*report.span_distance)},
                           {"threshold", report.verify_threshold.value_or(0.0)},
                           {"pass", *report.span_distance <= report.verify_threshold.value_or(0.0)}};
  }
  return doc.dump(2) + "\n";
}

RunReport parse_report(std::string_view text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(origin + ": malformed JSON at byte " + std::to_string(e.byte));
  }
  try {
    if (member(doc, "format", "format") != "bcrecon-report") fail("field 'format': not a bcrecon report");
    RunReport r;
    r.command = member(doc, "command", "command");
    r.problem = parse_problem(member(doc, "problem", "problem").dump(), origin + "#problem");
    r.settings = settings_from_json(member(doc, "settings", "settings"));
    r.warnings = member(doc, "warnings", "warnings").get<std::vector<std::string>>();
    const json& result = member(doc, "result", "result");
    if (!result.is_null()) r.reconstruction = reconstruction_from_json(result);
    if (doc.contains("verification")) {
      const json& v = doc.at("verification");
      r.span_distance = number_or_nan(member(v, "span_distance", "verification.span_distance"), "verification");
      r.verify_threshold = number_field(member(v, "threshold", "verification.threshold"), "verification");
    }
    return r;
  } catch (const json::exception& e) {
    fail(origin + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    fail(origin + ": " + e.what());
  }
}

}  // namespace bcrecon::io
