// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "plap/apps.hpp"
#include "plap/scenario.hpp"

using namespace plap;

#ifndef PLAP_SCENARIO_DIR
#define PLAP_SCENARIO_DIR "scenarios"
#endif

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void verdict(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s [%2d] %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

constexpr Index kCells = 1024;  // h = 2^-10

struct Oracle1D {
  DomainPtr domain = Domain::interval(1.0, kCells);
  Weight one = Weight::constant(domain, 1.0);
};

void oracle_constants_1d() {
  const auto t0 = Clock::now();
  const Oracle1D o;
  const TorsionData td = solve_torsion(o.one, 2.0);
  const EigenPair ep = principal_eigenpair(o.one, 2.0);
  const double secs = seconds_since(t0);

  // Independent references: nodal x(1-x)/2 and sin(πx).
  double phi_err = 0.0, u_err = 0.0;
  for (Index i = 0; i < o.domain->size(); ++i) {
    const double x = o.domain->coordinates(i).x();
    phi_err = std::max(phi_err, std::abs(td.phi[i] - x * (1 - x) / 2));
    u_err = std::max(u_err, std::abs(ep.u1[i] - std::sin(std::numbers::pi * x)));
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double ea = rel(td.alpha(), 8.0), em = rel(td.mu(), 4.0), el = rel(ep.lambda1, pi2);
  std::ostringstream os;
  os << "alpha=" << td.alpha() << " (rel " << ea << "), mu=" << td.mu() << " (rel " << em
     << "), lambda1=" << ep.lambda1 << " (rel " << el << "), |phi-x(1-x)/2|=" << phi_err
     << ", |u1-sin(pi x)|=" << u_err << ", " << secs << " s";
  verdict(1, "1D oracle constants", ea <= 1e-3 && em <= 1e-2 && el <= 1e-3 && secs <= 10.0, os.str());
}

void oracle_constants_radial() {
  const auto d = Domain::radial_ball(1.0, 2, kCells);
  const Weight one = Weight::constant(d, 1.0);
  const TorsionData td = solve_torsion(one, 2.0);
  const EigenPair ep = principal_eigenpair(one, 2.0);
  const double j0 = oracle::bessel_j0_zero();
  const double shoot = oracle::ball_lambda1_shooting(2);
  double phi_err = 0.0;
  for (Index i = 0; i < d->size(); ++i)
    phi_err = std::max(phi_err, std::abs(td.phi[i] - oracle::torsion_ball(d->coordinates(i).x(), 2)));
  const double ea = rel(td.alpha(), 4.0), em = rel(td.mu(), 2.0), el = rel(ep.lambda1, j0 * j0);
  std::ostringstream os;
  os << "alpha=" << td.alpha() << " (rel " << ea << "), mu=" << td.mu() << " (rel " << em
     << "), lambda1=" << ep.lambda1 << " vs j0^2=" << j0 * j0 << " (rel " << el << "), shooting=" << shoot
     << ", |phi-(1-r^2)/4|=" << phi_err;
  verdict(2, "radial oracle constants", ea <= 1e-2 && em <= 1e-2 && el <= 1e-2 && rel(shoot, j0 * j0) <= 1e-6,
          os.str());
}

void strict_gap() {
  bool pass = true;
  int count = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_name;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(PLAP_SCENARIO_DIR))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> covered;
  for (const auto& f : files) {
    const Scenario s = load_scenario(f);
    const RunResult r = scenario_thresholds(s);
    if (!r.report.contains("gap")) {
      pass = false;
      worst_name = s.name + " (no constants: " + r.message + ")";
      continue;
    }
    const double alpha = r.report["gap"]["alpha"], lambda1 = r.report["gap"]["lambda1"];
    const double ratio = (lambda1 - alpha) / lambda1;
    if (ratio < worst) {
      worst = ratio;
      worst_name = s.name;
    }
    pass = pass && ratio > 1e-3;
    ++count;
    std::ostringstream tag;
    tag << to_string(s.domain.kind) << "/p" << s.p;
    if (std::find(covered.begin(), covered.end(), tag.str()) == covered.end()) covered.push_back(tag.str());
  }
  std::ostringstream os;
  os << count << " scenarios, min (lambda1-alpha)/lambda1 = " << worst << " at " << worst_name << "; covers";
  for (const auto& c : covered) os << " " << c;
  verdict(3, "strict gap alpha < lambda1", pass && count > 0, os.str());
}

void sandwich_sweep() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double ps[] = {1.5, 2.0, 3.0};
  int tuples = 0, passed = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::string first_failure;
  for (int k = 0; k < 24; ++k) {
    Scenario s;
    s.name = "sweep-" + std::to_string(k);
    s.domain.cells = static_cast<int>(kCells);
    s.p = ps[k % 3];
    s.q = 1.0 + (s.p - 1.0) * (0.15 + 0.7 * unit(rng));
    // Every fourth tuple uses a + b < p - 1 and the root super-solution.
    const double total = (k % 4 == 3 ? 0.6 : 1.0) * (s.p - 1.0);
    s.a = total * unit(rng);
    s.b = total - s.a;
    s.lambda = std::pow(10.0, -1.5 + 3.0 * unit(rng));
    if (k % 4 == 3)
      s.beta = 2.0 * unit(rng);
    else
      s.beta_factor = 0.9 * unit(rng);
    ++tuples;
    const RunResult r = run_scenario(s);
    bool ok = r.exit_code == exit_ok;
    if (ok) {
      const json& j = r.report["solve"];
      const double sup = j["sup_u"];
      const double margin = std::min(j["lower_margin"].get<double>(), j["upper_margin"].get<double>()) / sup;
      worst = std::min(worst, margin);
      ok = j["converged"] == true && margin >= -1e-6;
    }
    if (ok) {
      ++passed;
    } else if (std::getenv("PLAP_VERBOSE") || first_failure.empty()) {
      std::ostringstream os;
      os << " first failure p=" << s.p << " q=" << s.q << " a=" << s.a << " b=" << s.b << " lambda=" << *s.lambda
         << " beta=" << (s.beta ? *s.beta : *s.beta_factor) << (s.beta ? "" : "*alpha/mu^b") << ": " << r.message;
      first_failure += os.str();
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << passed << "/" << tuples << " tuples sandwiched, min margin/sup = " << worst << ", " << secs << " s"
     << first_failure;
  verdict(4, "sub/super sandwich sweep", tuples >= 20 && passed == tuples && secs <= 300.0, os.str());
}

void m_root_sweep() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Oracle1D o;
  int tuples = 0, passed = 0;
  double worst = 0.0;
  for (double p : {1.5, 2.0, 3.0}) {
    const TorsionData td = solve_torsion(o.one, p);
    for (int k = 0; k < 30; ++k) {
      const double q = 1.0 + (p - 1.0) * (0.05 + 0.9 * unit(rng));
      const double total = (p - 1.0) * 0.95 * unit(rng);
      const double a = total * unit(rng), b = total - a;
      const double lam = std::pow(10.0, -3.0 + 6.0 * unit(rng));
      const double beta = std::pow(10.0, -3.0 + 6.0 * unit(rng));
      const ProblemSpec spec = ProblemSpec::two_parameter(p, q, a, b, lam, beta, o.one, o.one);
      ++tuples;
      try {
        const double M = solve_M_root(spec, td);
        const double top = td.alpha() * std::pow(M, p - 1.0);
        const double r = std::abs(M_root_defect(spec, td, M)) / top;
        worst = std::max(worst, r);
        if (r <= 1e-12 && top >= lam * std::pow(M, q - 1.0)) ++passed;
      } catch (const std::exception&) {
      }
    }
  }
  std::ostringstream os;
  os << passed << "/" << tuples << " tuples, max relative residual " << worst;
  verdict(5, "M root sweep", passed == tuples, os.str());
}

ScalarField continuation_profile_holder = ScalarField::zeros(Domain::interval(1.0, 2));
double continuation_lambda = 0.0;

void continuation() {
  const auto t0 = Clock::now();
  const Oracle1D o;
  const TorsionData td = solve_torsion(o.one, 2.0);
  const EigenPair ep = principal_eigenpair(o.one, 2.0);
  const double beta_max = td.alpha() / std::sqrt(td.mu());
  bool pass = true;
  std::ostringstream os;
  for (double factor : {0.0, 0.3, 0.6}) {
    const ProblemSpec spec = ProblemSpec::two_parameter(2.0, 1.5, 0.5, 0.5, 1.0, factor * beta_max, o.one, o.one);
    ContinuationOptions opt;
    opt.stages = 8;
    const ContinuationTrace t = continuation_q_to_p(spec, td, ep, opt);
    bool bounds = t.complete && t.stages.size() == 8;
    for (const ContinuationStage& s : t.stages)
      bounds = bounds && s.lambda_q >= t.lower - 1e-2 && s.lambda_q <= t.lambda1 + 1e-2;
    const bool gap = t.lambda_beta < t.lambda1 - 1e-3;
    pass = pass && bounds && gap;
    os << "beta=" << factor << "*alpha/mu^b: lambda_beta=" << t.lambda_beta << " (+-" << t.lambda_beta_error
       << ") in [" << t.lower << ", " << t.lambda1 << "] " << (bounds ? "bounds ok" : "bounds FAIL") << ", "
       << (gap ? "gap ok" : "gap FAIL") << "; ";
    if (factor == 0.3 && t.u_beta) {
      continuation_profile_holder = *t.u_beta;
      continuation_lambda = t.lambda_beta;
    }
  }
  const double secs = seconds_since(t0);
  os << secs << " s";
  verdict(6, "q -> p continuation", pass && secs <= 600.0, os.str());
}

void example1() {
  const Oracle1D o;
  const TorsionData td = solve_torsion(o.one, 2.0);
  const EigenPair ep = principal_eigenpair(o.one, 2.0);
  const Example1Result r = example1_driver(ProblemSpec::example1(2.0, 1.5, 1.0, o.one), td, ep);
  const double target = 3.0 * std::pow(3.0, -0.25);
  const double e = rel(r.thresholds.lambda_star, target);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double lo = 1.0 / (pi2 * pi2), hi = std::pow(3.0, -0.5) / 4.0;
  const double sup = r.solve ? r.solve->sup_u : std::numeric_limits<double>::quiet_NaN();
  const bool in = sup >= lo - 1e-3 && sup <= hi + 1e-3;
  std::ostringstream os;
  os << "lambda_*=" << r.thresholds.lambda_star << " vs 3*3^(-1/4)=" << target << " (rel " << e << "); sup u=" << sup
     << " in [" << lo << ", " << hi << "]";
  verdict(7, "example 1 threshold and bracket", e <= 1e-2 && in && r.solve && r.solve->converged, os.str());
}

void example2() {
  const std::filesystem::path dir = PLAP_SCENARIO_DIR;
  int agree = 0, total = 0;
  std::ostringstream os;
  for (const char* name : {"example2-uniform", "example2-threshold", "example2-oscillating"}) {
    const RunResult r = run_scenario_file(dir / (std::string(name) + ".json"));
    ++total;
    if (r.report.contains("example2")) {
      const json& j = r.report["example2"];
      const bool ok = r.exit_code == exit_ok && j["agree"] == true;
      if (ok) ++agree;
      os << name << " " << j["discrepancy"].get<double>() << "/" << j["tolerance"].get<double>() << "; ";
    } else {
      os << name << " exit " << r.exit_code << ": " << r.message << "; ";
    }
  }
  os << agree << "/" << total << " agree";
  verdict(8, "example 2 cross-validation", agree == total, os.str());
}

void homogeneity() {
  const ScalarField& u = continuation_profile_holder;
  if (continuation_lambda == 0.0) {
    verdict(9, "homogeneity at q = p", false, "no continuation profile available");
    return;
  }
  const Oracle1D o;
  const TorsionData td = solve_torsion(o.one, 2.0);
  const double beta = 0.3 * td.alpha() / std::sqrt(td.mu());
  const ProblemSpec spec = ProblemSpec::two_parameter(2.0, 2.0, 0.5, 0.5, continuation_lambda, beta, o.one, o.one);
  bool pass = true;
  std::ostringstream os;
  for (double k : {0.5, 2.0, 10.0}) {
    const HomogeneityReport h = homogeneity_check(u, spec, k);
    pass = pass && h.difference <= 1e-6;
    os << "k=" << k << " diff=" << h.difference << "; ";
  }
  verdict(9, "homogeneity at q = p", pass, os.str());
}

void probe() {
  const Oracle1D o;
  const EigenPair ep = principal_eigenpair(o.one, 2.0);
  const ProblemSpec spec = ProblemSpec::two_parameter(2.0, 2.0, 0.5, 0.5, 1.1 * ep.lambda1, 0.0, o.one, o.one);
  ProbeOptions opt;
  opt.seed = 7;
  const ProbeReport r = nonexistence_probe(spec, ep, opt);
  bool pass = !r.starts.empty();
  std::ostringstream os;
  for (const ProbeStart& s : r.starts) {
    pass = pass && std::abs(s.final_growth - 1.1) <= 1e-2;
    os << s.final_growth << " ";
  }
  os << "vs predicted " << r.predicted << ", verdict " << to_string(r.verdict);
  verdict(10, "nonexistence probe growth", pass, os.str());
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::vector<void (*)()> criteria = {oracle_constants_1d, oracle_constants_radial, strict_gap, sandwich_sweep,
                                            m_root_sweep, continuation, example1, example2, homogeneity, probe};
  int id = 0;
  for (auto run : criteria) {
    ++id;
    try {
      run();
    } catch (const std::exception& e) {
      verdict(id, "criterion", false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed, %.1f s\n", failures, criteria.size(), seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
