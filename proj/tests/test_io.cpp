#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "plap/expr.hpp"
#include "plap/io.hpp"
#include "plap/scenario.hpp"

using namespace plap;

#ifndef PLAP_SCENARIO_DIR
#define PLAP_SCENARIO_DIR "scenarios"
#endif

TEST_CASE("expression evaluation") {
  CHECK(Expression("1 + 2*3")(0.0) == 7.0);
  CHECK(Expression("2^3^2")(0.0) == 512.0);
  CHECK(Expression("-2^2")(0.0) == -4.0);
  CHECK(Expression("(1 - x)*x")(0.25) == doctest::Approx(0.1875));
  CHECK(Expression("r")(3.0, 4.0) == doctest::Approx(5.0));
  CHECK(Expression("sin(pi*x) + cos(0) + exp(0) + abs(-y)")(0.5, 2.0) == doctest::Approx(5.0));
  CHECK(Expression("min(x, y) + max(x, y)")(1.0, 2.0) == doctest::Approx(3.0));
  CHECK(Expression("e")(0.0) == doctest::Approx(std::numbers::e));
  CHECK(Expression("4/2/2")(0.0) == 1.0);
}

TEST_CASE("expression errors carry a position") {
  for (const char* bad : {"1 +", "sin(x", "foo(x)", "min(1)", "1 2", "z", "", "2**3", "max(1,2,3)"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Expression{bad}, ExpressionError);
  }
  try {
    Expression("1 + q");
  } catch (const ExpressionError& e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("sampled expressions respect the boundary flag") {
  const auto d = Domain::interval(1.0, 8);
  const ScalarField f = sample_expression(d, Expression("1 + x"), true);
  CHECK(f[0] == 0.0);
  CHECK(f[8] == 0.0);
  CHECK(f[4] == doctest::Approx(1.5));
  CHECK(sample_expression(d, Expression("1 + x"), false)[8] == doctest::Approx(2.0));
}

TEST_CASE("field JSON and CSV round trips") {
  const auto d = Domain::rectangle(1.0, 0.5, 8);
  const ScalarField f =
      ScalarField::sample(d, [](const Point& x) { return std::sin(3.0 * x.x()) * std::exp(x.y()) / 3.0; }, true);
  const ScalarField g = field_from_json(json::parse(dump_json(field_to_json(f))));
  CHECK(g.domain().kind() == DomainKind::rectangle);
  CHECK(g.domain().cells_y() == 4);
  CHECK((g.values() - f.values()).cwiseAbs().maxCoeff() == 0.0);

  std::stringstream csv;
  write_field_csv(f, csv);
  const ScalarField h = read_field_csv(d, csv, true);
  CHECK((h.values() - f.values()).cwiseAbs().maxCoeff() == 0.0);

  const auto ball = domain_from_json(json::parse(dump_json(domain_to_json(*Domain::radial_ball(2.0, 3, 16)))));
  CHECK(ball->kind() == DomainKind::radial_ball);
  CHECK(ball->ambient_dimension() == 3);
  CHECK(ball->h() == doctest::Approx(0.125));
}

TEST_CASE("format_real round-trips") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> exponent(-300.0, 300.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = std::pow(10.0, exponent(rng)) * (k % 2 ? -1.0 : 1.0);
    CHECK(std::stod(format_real(x)) == x);
  }
}

namespace {

const char* kMinimal = R"({
  "name": "t",
  "domain": {"kind": "interval", "length": 1.0, "cells": 64},
  "problem": {"form": "two_parameter", "p": 2, "q": 1.5, "a": 0.5, "b": 0.5, "lambda": 1.0, "beta": 0.0}
})";

ConfigError parse_error(std::string text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("no ConfigError for: " << text);
  return ConfigError("", "");
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST_CASE("scenario parsing") {
  const Scenario s = parse_scenario(kMinimal);
  CHECK(s.name == "t");
  CHECK(s.domain.cells == 64);
  CHECK(*s.lambda == 1.0);
  CHECK_FALSE(s.continuation.has_value());
}

TEST_CASE("scenario errors name the field and line") {
  ConfigError e = parse_error(replace(kMinimal, "\"p\": 2", "\"p\": \"two\""));
  CHECK(e.field() == "problem.p");
  CHECK(e.line() == 4);

  e = parse_error(replace(kMinimal, "\"cells\": 64", "\"cells\": 64, \"colour\": 1"));
  CHECK(e.field() == "domain.colour");
  CHECK(e.line() == 3);

  e = parse_error(replace(kMinimal, "\"kind\": \"interval\"", "\"kind\": \"torus\""));
  CHECK(e.field() == "domain.kind");

  e = parse_error(replace(kMinimal, "\"name\": \"t\"", "\"name\": \"a/b\""));
  CHECK(e.field() == "name");

  e = parse_error(replace(kMinimal, "\"beta\": 0.0}", "\"beta\": 0.0,}"));
  CHECK(e.line() > 0);

  e = parse_error(replace(kMinimal, "\"beta\": 0.0", "\"beta\": 0.0, \"omega1\": \"1 + \""));
  CHECK(e.field() == "problem.omega1");
}

TEST_CASE("run_scenario exit codes") {
  Scenario s = parse_scenario(kMinimal);
  RunResult r = run_scenario(s);
  CHECK(r.exit_code == exit_ok);
  CHECK(r.report.contains("solve"));

  s.beta_factor = 2.0;
  s.beta.reset();
  r = run_scenario(s);
  CHECK(r.exit_code == exit_hypothesis);

  s = parse_scenario(kMinimal);
  s.omega1 = "x - 0.5";
  CHECK(run_scenario(s).exit_code == exit_config);

  s = parse_scenario(kMinimal);
  s.max_iterations = 2;
  CHECK(run_scenario(s).exit_code == exit_solver);
}

TEST_CASE("shipped scenarios on a coarse grid") {
  RunOptions opt;
  opt.h = 1.0 / 128;
  const std::filesystem::path dir = PLAP_SCENARIO_DIR;
  CHECK(run_scenario_file(dir / "interval-baseline.json", opt).exit_code == exit_ok);
  CHECK(run_scenario_file(dir / "example1-baseline.json", opt).exit_code == exit_ok);
  CHECK(run_scenario_file(dir / "example1-refused.json", opt).exit_code == exit_hypothesis);
  CHECK(run_scenario_file(dir / "interval-beta-violation.json", opt).exit_code == exit_hypothesis);
  CHECK(run_scenario_file(dir / "does-not-exist.json", opt).exit_code == exit_config);
}

TEST_CASE("artifacts are written and parse back") {
  const auto out = std::filesystem::temp_directory_path() / "plap-test-artifacts";
  std::filesystem::remove_all(out);
  RunOptions opt;
  opt.out = out;
  const RunResult r = run_scenario(parse_scenario(kMinimal), opt);
  REQUIRE(r.exit_code == exit_ok);
  std::ifstream report(out / "t" / "report.json");
  REQUIRE(report.good());
  const json j = json::parse(report);
  CHECK(j["exit_code"] == 0);
  std::ifstream csv(out / "t" / "solution.csv");
  const ScalarField u = read_field_csv(Domain::interval(1.0, 64), csv, true);
  CHECK(sup_norm(u) == doctest::Approx(j["solve"]["sup_u"].get<double>()).epsilon(1e-15));
  std::filesystem::remove_all(out);
}

TEST_CASE("randomized admissible tuples solve inside the pair") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    Scenario s = parse_scenario(kMinimal);
    s.domain.cells = 64;
    s.p = 1.5 + 1.5 * unit(rng);
    s.q = 1.0 + (s.p - 1.0) * (0.15 + 0.7 * unit(rng));
    s.a = (s.p - 1.0) * unit(rng);
    s.b = s.p - 1.0 - s.a;
    s.lambda = std::pow(10.0, -2.0 + 4.0 * unit(rng));
    s.beta.reset();
    s.beta_factor = 0.9 * unit(rng);
    CAPTURE(s.p);
    CAPTURE(s.q);
    CAPTURE(s.a);
    CAPTURE(*s.lambda);
    CAPTURE(*s.beta_factor);
    const RunResult r = run_scenario(s);
    CHECK(r.exit_code == exit_ok);
    CHECK(r.report["solve"]["sandwich_pass"] == true);
  }
}
