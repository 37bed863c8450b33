#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plap/eigenpair.hpp"
#include "plap/problem.hpp"
#include "plap/subsuper.hpp"

namespace plap {

struct SolveOptions {
  /// Fixed-point stop: sup|u^{k+1} - u^k| <= tol·‖u‖∞.  The full residual
  /// must then be within tol·max f, or twice the inner solver's noise floor
  /// when that is larger.
  double tol = 1e-10;
  int max_iterations = 20000;
  /// Allowed excursion outside [sub, super], relative to ‖u‖∞.
  double sandwich_slack = 1e-8;
  SolverOptions inner{1e-12};
};

struct IterationRecord {
  double sup_u = 0.0;
  double step = 0.0;
  double residual = 0.0;  ///< inner solve residual
  double floor = 0.0;     ///< residual attainable in double precision
};

struct SolveReport {
  explicit SolveReport(ScalarField start) : solution(std::move(start)) {}

  ScalarField solution;
  int iterations = 0;
  double residual = 0.0;  ///< weak residual of the full equation at the solution
  double residual_tol = 0.0;  ///< max(tol·max f, 2 × last inner floor)
  double sup_u = 0.0;
  bool converged = false;
  bool sandwich_pass = false;
  double lower_margin = 0.0;  ///< min(u - sub)
  double upper_margin = 0.0;  ///< min(super - u)
  bool escaped = false;       ///< some iterate left the order interval by more than the slack
  bool monotone = true;       ///< sup-norms were nondecreasing (monitored only)
  std::string message;
  std::vector<IterationRecord> trace;
};

/// u⁰ = pair.sub (or `initial`), u^{k+1} solves -Δ_p u^{k+1} = max(f(x, u^k, |∇u^k|), 0).
/// Stops on the fixed-point criterion, then measures the full-equation
/// residual and the sandwich pair.sub <= u <= pair.super.
SolveReport frozen_gradient_solve(const ProblemSpec& spec, const SubSuperPair& pair, const SolveOptions& options = {},
                                  const ScalarField* initial = nullptr);

struct ContinuationStage {
  double q = 0.0;
  double lambda_internal = 0.0;  ///< λ actually used in the stage solve
  double log_sup_v = 0.0;        ///< log ‖v_q‖∞ at the requested λ
  double sup_v = 0.0;            ///< exp(log_sup_v); may under/overflow to 0 or inf
  double lambda_q = 0.0;         ///< λ/‖v_q‖∞^{p-q}
  double sup_grad = 0.0;         ///< ‖∇u_q‖∞ of the normalized profile
  bool in_bounds = false;        ///< λ_q within [α - βμ^b, λ₁] up to the bound tolerance
  int iterations = 0;
  double residual = 0.0;
  bool sandwich_pass = false;
};

struct ContinuationOptions {
  int stages = 8;  ///< q_n = p - (p - q₀)2^{-n}, n = 0..stages-1
  std::vector<double> schedule;  ///< explicit q_n; overrides `stages` when nonempty
  double bound_tol = 1e-2;
  SolveOptions solve;
};

struct ContinuationTrace {
  std::vector<ContinuationStage> stages;
  double alpha = 0.0;
  double lambda1 = 0.0;
  double lower = 0.0;  ///< α - βμ^b
  double lambda_beta = 0.0;
  double lambda_beta_error = 0.0;
  std::optional<ScalarField> u_beta;  ///< last normalized stage profile
  bool complete = false;        ///< every scheduled stage converged
  bool bounds_hold = false;     ///< every λ_q within the bracket
  bool strict_gap = false;      ///< λ_β < λ₁ - 10⁻⁶λ₁
  bool gradient_bounded = false;  ///< max sup|∇u_q| <= 10 × median
  std::string message;
};

/// q → p⁻ continuation for the two-parameter problem with a + b = p - 1.
/// Each stage solves at an internal λ chosen to keep ‖v_q‖∞ near one and
/// converts through v ↦ tv, which maps λ to λt^{p-q}.
ContinuationTrace continuation_q_to_p(const ProblemSpec& spec, const TorsionData& td, const EigenPair& ep,
                                      const ContinuationOptions& options = {});

struct HomogeneityReport {
  double k = 1.0;
  double residual_u = 0.0;
  double residual_ku = 0.0;
  double difference = 0.0;  ///< |residual_ku - k^{p-1} residual_u|
};

/// Weak residuals of u and ku for the q = p problem.
HomogeneityReport homogeneity_check(const ScalarField& u, const ProblemSpec& spec, double k);

enum class ProbeVerdict { grows, collapses, anomaly, neutral };
std::string to_string(ProbeVerdict verdict);

struct ProbeStart {
  std::vector<double> sup_norms;
  std::vector<double> growth;  ///< sup_norms[k+1]/sup_norms[k]
  double final_growth = 0.0;
  ProbeVerdict verdict = ProbeVerdict::neutral;
};

struct ProbeReport {
  double ratio = 0.0;      ///< λ/λ₁
  double predicted = 0.0;  ///< (λ/λ₁)^{1/(p-1)}
  std::uint64_t seed = 0;
  std::vector<ProbeStart> starts;
  ProbeVerdict verdict = ProbeVerdict::neutral;
};

struct ProbeOptions {
  int starts = 3;
  int iterations = 40;
  std::uint64_t seed = 1;
  double cap = 1e12;  ///< stop a start once ‖u‖∞ passes this
};

/// Frozen-gradient iteration for q = p from seeded random positive starts.
/// Collapse toward 0 and growth past every cap both mean no positive fixed
/// profile; a converged positive profile is flagged as an anomaly.
ProbeReport nonexistence_probe(const ProblemSpec& spec, const EigenPair& ep, const ProbeOptions& options = {});

}  // namespace plap
