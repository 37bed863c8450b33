#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "plap/apps.hpp"
#include "plap/io.hpp"

namespace plap {

/// Malformed scenario: carries the offending line (0 when unknown) and field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string field, std::size_t line = 0)
      : std::runtime_error(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

struct DomainConfig {
  DomainKind kind = DomainKind::interval;
  double lx = 1.0;
  double ly = 1.0;
  int dimension = 2;  ///< ball only
  int cells = 1024;   ///< along x (or r)
};

struct ContinuationConfig {
  double q0 = 0.0;  ///< base exponent; 0 means p - (p - 1)/2
  int stages = 8;
  double bound_tol = 1e-2;
};

struct ProbeConfig {
  double lambda_ratio = 1.1;  ///< λ/λ₁
  int starts = 3;
  int iterations = 40;
};

/// One self-contained run description.
struct Scenario {
  std::string name;
  DomainConfig domain;
  NonlinearityForm form = NonlinearityForm::two_parameter;
  double p = 2.0;
  double q = 1.5;
  double a = 0.5;
  double b = 0.5;
  std::optional<double> lambda;
  std::optional<double> lambda_factor;  ///< λ as a multiple of the form's λ_*
  std::optional<double> beta;
  std::optional<double> beta_factor;  ///< β as a multiple of α/μ^b
  std::string omega1 = "1";
  std::string omega2 = "1";
  std::string coefficient = "1";
  double c0 = 1.0;
  double c1 = 1.0;
  double tol = 1e-10;
  double inner_tol = 1e-12;
  int max_iterations = 20000;
  std::optional<ContinuationConfig> continuation;
  std::optional<ProbeConfig> probe;
  std::uint64_t seed = 1;
};

/// Parses a scenario document; throws ConfigError with line and field.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

struct RunOptions {
  std::optional<double> h;    ///< overrides the grid spacing
  std::optional<double> tol;  ///< overrides the fixed-point tolerance
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;  ///< artifact directory; empty writes nothing
};

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_hypothesis = 2, exit_solver = 3 };

struct RunResult {
  int exit_code = exit_ok;
  std::string name;
  std::string message;
  json report;
};

DomainPtr build_domain(const DomainConfig& config, std::optional<double> h = std::nullopt);

/// Full pipeline: torsion, eigenpair, thresholds, pair, solve, and the
/// q → p continuation when q = p.  Writes report.json, CSV fields, and CSV
/// traces under options.out / scenario.name.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});
RunResult run_scenario_file(const std::filesystem::path& path, const RunOptions& options = {});

/// Torsion, eigenpair, and ThresholdReport only.
RunResult scenario_thresholds(const Scenario& scenario, const RunOptions& options = {});

json to_json(const TorsionData& td);
json to_json(const EigenPair& ep);
json to_json(const ThresholdReport& report);
json to_json(const SolveReport& report);
json to_json(const ContinuationTrace& trace);
json to_json(const ProbeReport& report);

/// n,q,lambda_internal,log_sup_v,sup_v,lambda_q,sup_grad,in_bounds
void write_trace_csv(const ContinuationTrace& trace, std::ostream& out);
/// iteration,sup_u,step,residual,floor
void write_iterations_csv(const SolveReport& report, std::ostream& out);

}  // namespace plap
