#include <doctest.h>

#include <random>

#include "bcrecon/error.hpp"
#include "bcrecon/io.hpp"
#include "support.hpp"

using namespace bcrecon;

namespace {

std::string parse_error(std::string_view text) {
  try {
    io::parse_problem(text, "input.json");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    return e.what();
  }
  FAIL("parse error expected");
  return {};
}

bool contains(const std::string& s, const char* part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("problem: shipped fixture") {
    const auto spec = io::load_problem(testsupport::fixture("example_problem.json"));
    CHECK(spec.p == testsupport::kExampleP);
    REQUIRE(spec.boundary);
    CHECK(*spec.boundary == testsupport::example_matrix());
    REQUIRE(spec.region);
    CHECK(*spec.region == SearchRegion{});
  }

  TEST_CASE("problem: optional parts may be absent") {
    const auto spec = io::parse_problem(R"({"p": [[1, 0], [2, 0], [3, 0]]})");
    CHECK(!spec.boundary);
    CHECK(!spec.region);
    const auto g = io::parse_problem(
        R"({"p": [[1, 0], [2, 0], [3, 0]], "region": {"re_min": -1, "re_max": 1, "im_min": -2, "im_max": 2}})");
    CHECK(g.region->grid_density == 4.0);
  }

  TEST_CASE("problem: syntax errors carry line and column") {
    const std::string msg = parse_error("{\n  \"p\": [[1, 0],\n  oops\n}");
    CHECK(contains(msg, "input.json:3:"));
  }

  TEST_CASE("problem: schema errors name the field") {
    CHECK(contains(parse_error(R"({"q": 1})"), "'p'"));
    CHECK(contains(parse_error(R"({"p": [[1, 0], [2, 0]]})"), "'p'"));
    CHECK(contains(parse_error(R"({"p": [[1, 0], [2, 0], [3]]})"), "p[2]"));
    CHECK(contains(parse_error(R"({"p": [[1, 0], [2, 0], [3, 0]], "boundary": [[]]})"), "boundary"));
    CHECK(contains(parse_error(R"({"p": [[1,0],[2,0],[3,0]], "region": {"re_min": 1, "re_max": 0, "im_min": 0, "im_max": 1}})"),
                   "region"));
    CHECK(contains(parse_error("[1, 2, 3]"), "object"));
  }

  TEST_CASE("problem: rank-deficient boundary is rejected while parsing") {
    const std::string msg = parse_error(R"({"p": [[1,0],[2,0],[3,0]], "boundary": [
      [[1,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
      [[2,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
      [[0,0],[1,0],[0,0],[0,0],[0,0],[0,0]]]})");
    CHECK(contains(msg, "rank"));
  }

  TEST_CASE("problem: write then read is the identity") {
    std::mt19937_64 rng(71);
    io::ProblemSpec spec{testsupport::random_problem(rng), testsupport::random_boundary(rng), SearchRegion{}};
    spec.region->grid_density = 3.7;
    CHECK(io::parse_problem(io::format_problem(spec)) == spec);
  }

  TEST_CASE("spectrum: full precision round trip") {
    std::mt19937_64 rng(72);
    std::vector<Complex> v;
    for (int n = 0; n < 100; ++n) v.push_back(testsupport::box(rng, 60.0));
    v.push_back({1e-300, -0.1});
    const std::string text = io::format_spectrum_csv(v);
    CHECK(text.rfind("re,im\n", 0) == 0);
    CHECK(io::parse_spectrum_csv(text) == v);
    CHECK(io::format_spectrum_csv({}) == "re,im\n");
    CHECK(io::parse_spectrum_csv("re,im\r\n1,2\r\n").at(0) == Complex(1, 2));
  }

  TEST_CASE("spectrum: shipped fixture has the 19 printed values") {
    const auto v = io::load_spectrum(testsupport::fixture("example_spectrum.csv"));
    CHECK(v == testsupport::example_eigenvalues());
  }

  TEST_CASE("spectrum: malformed rows report the line") {
    auto msg = [](std::string_view text) {
      try {
        io::parse_spectrum_csv(text, "s.csv");
      } catch (const Error& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(contains(msg("x,y\n1,2\n"), "s.csv:1"));
    CHECK(contains(msg("re,im\n1,2\n3\n"), "s.csv:3"));
    CHECK(contains(msg("re,im\n1,abc\n"), "s.csv:2"));
    CHECK(contains(msg("re,im\n1,inf\n"), "s.csv:2"));
    CHECK(contains(msg(""), "s.csv:1"));
  }

  TEST_CASE("perturbation csv: round trip including failed trials") {
    const std::vector<PerturbationRecord> records{
        {0, 1e-4, 0.123456789012345678, "ok"},
        {1, 1e-4, std::numeric_limits<double>::quiet_NaN(), "failed: too-few-eigenvalues"},
        {2, 1e-4, 0.99, "inconsistent"}};
    const auto text = io::format_perturbation_csv(records);
    const auto back = io::parse_perturbation_csv(text);
    REQUIRE(back.size() == 3);
    CHECK(back[0] == records[0]);
    CHECK(std::isnan(back[1].span_distance));
    CHECK(back[1].status == records[1].status);
    CHECK(back[2] == records[2]);
    CHECK(io::format_perturbation_csv(back) == text);
  }

  TEST_CASE("boundary conditions in readable form") {
    const auto lines = io::format_boundary_conditions(testsupport::example_matrix());
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "U_1(y) = y(0) + y'(0) + 0.5 y(1) + y''(1) = 0");
    CHECK(lines[1] == "U_2(y) = y''(0) = 0");
    CHECK(lines[2] == "U_3(y) = 0.5 y(1) + y'(1) = 0");
    ComplexMatrix a(3, 6);
    a(0, 0) = {0.0, -2.0};
    a(0, 1) = 1e-9;  // below the display threshold
    a(0, 2) = {1.5, -0.5};
    a(1, 1) = -1.0;
    a(2, 5) = {0.0, 1.0};
    const auto other = io::format_boundary_conditions(BoundaryMatrix(a));
    CHECK(other[0] == "U_1(y) = -2i y(0) + (1.5-0.5i) y''(0) = 0");
    CHECK(other[1] == "U_2(y) = -y'(0) = 0");
    CHECK(other[2] == "U_3(y) = 1i y''(1) = 0");
  }

  TEST_CASE("report: serialization is lossless") {
    std::mt19937_64 rng(73);
    const auto a = testsupport::random_boundary(rng);
    const auto eig = find_eigenvalues(testsupport::kExampleP, a, SearchRegion{}).spectrum.eigenvalues;
    io::RunReport report;
    report.command = {{"name", "verify"}, {"problem", "x.json"}};
    report.problem = {testsupport::kExampleP, a, SearchRegion{}};
    report.settings = InversionSettings{250.0, 1e-7, 19};
    report.reconstruction = invert_spectrum(testsupport::kExampleP, eig, report.settings);
    report.span_distance = 3.25e-11;
    report.verify_threshold = 1e-6;
    report.warnings = {"something to note"};

    const std::string text = io::format_report(report);
    const auto back = io::parse_report(text);
    CHECK(io::format_report(back) == text);
    CHECK(back.command == report.command);
    CHECK(back.problem == report.problem);
    CHECK(back.settings.rank_gap_threshold == 250.0);
    CHECK(back.span_distance == report.span_distance);
    CHECK(back.warnings == report.warnings);
    REQUIRE(back.reconstruction);
    const auto& x = *report.reconstruction;
    const auto& y = *back.reconstruction;
    CHECK(y.minors == x.minors);
    CHECK(y.matrix == x.matrix);
    CHECK(y.eigenvalues == x.eigenvalues);
    CHECK(y.singular_values == x.singular_values);
    CHECK(y.residuals == x.residuals);
    CHECK(y.rank_gap == x.rank_gap);
    CHECK(y.pivot_used == x.pivot_used);
    CHECK(y.theorem1.checks.size() == 26);
    CHECK(y.theorem1.roots.omega == x.theorem1.roots.omega);
  }

  TEST_CASE("report: rejects other documents") {
    CHECK_THROWS_AS(io::parse_report(R"({"format": "other"})"), Error);
    CHECK_THROWS_AS(io::parse_report("{"), Error);
  }
}
