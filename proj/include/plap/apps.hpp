#pragma once

#include <limits>
#include <optional>
#include <string>

#include "plap/solve.hpp"

namespace plap {

/// Constants of one scenario and the admissibility verdict for its (λ, β).
struct ThresholdReport {
  double alpha = 0.0;
  double mu = 0.0;
  double lambda1 = 0.0;
  double beta_max = 0.0;  ///< α/μ^b
  double lambda_star = std::numeric_limits<double>::quiet_NaN();
  double M_star = std::numeric_limits<double>::quiet_NaN();
  double lambda = 0.0;
  double beta = 0.0;
  bool admissible = false;
  std::string verdict;
};

struct Example1Thresholds {
  double M_star = 0.0;       ///< (p/q - 1)^{1/p}/μ
  double H_min = 0.0;        ///< H(M_*) with H(M) = M^{q-p}(1 + μ^p M^p)
  double lambda_star = 0.0;  ///< closed form
  double cross_check = 0.0;  ///< relative gap between λ_* and α/H(M_*)
  double golden_M = 0.0;     ///< minimizer found by golden-section search
  bool minimizer_confirmed = false;
};

/// Closed-form threshold of λωu^{q-1}(1 + |∇u|^p), evaluated in log form.
/// Throws std::invalid_argument unless 1 < q < p, and std::runtime_error if
/// the cross-check against α/H(M_*) exceeds 10⁻¹² relative.
Example1Thresholds example1_thresholds(double p, double q, double alpha, double mu);

/// log H(M)
double example1_log_H(double M, double p, double q, double mu);

struct Example2Thresholds {
  double printed = 0.0;  ///< (1/c₁)((p-q)/μ^p)^{p-q}(α/(p-q+1))^{p-q}
  double box = 0.0;      ///< max over M of (αM^{p-1} - (μM)^p)/(c₁M^{q-1})
  double M_box = 0.0;    ///< maximizer of the box bound
  double admissible = 0.0;  ///< min(printed, box)
};

/// Throws std::invalid_argument unless 1 < q < p and c1 > 0.
Example2Thresholds example2_thresholds(double c1, double p, double q, double alpha, double mu);

struct Example1Result {
  Example1Thresholds thresholds;
  ThresholdReport report;
  HypothesisReport H1, H2, H3;
  double eps_sub = 0.0;    ///< (λ/λ₁)^{1/(p-q)}
  double eps_order = 0.0;  ///< (αM_*^{p-1}/λ₁)^{1/(p-1)}
  double eps = 0.0;        ///< min of the two
  bool order_condition_binding = false;  ///< eps_order < eps_sub
  double lower = 0.0;      ///< bracket: (λ/λ₁)^{1/(p-q)}
  double upper = 0.0;      ///< bracket: M_*
  bool bracket_pass = false;
  std::optional<SolveReport> solve;
};

/// Refuses λ > λ_* with ThresholdViolation; otherwise certifies (H1)-(H3),
/// builds (εu₁, M_*φ/‖φ‖∞), solves, and checks the sup-norm bracket.
Example1Result example1_driver(const ProblemSpec& spec, const TorsionData& td, const EigenPair& ep,
                               const SolveOptions& options = {}, double bracket_slack = 1e-3);

struct Example2Result {
  Example2Thresholds thresholds;
  ThresholdReport report;
  HypothesisReport H3_direct, H2_transformed, H3_transformed;
  double M = 0.0;    ///< super-solution amplitude of the direct problem
  double M_w = 0.0;  ///< super-solution amplitude of the transformed problem
  double eps = 0.0;
  double eps_w = 0.0;
  std::optional<SolveReport> direct;
  std::optional<SolveReport> transformed;  ///< solution in w
  std::optional<ScalarField> mapped;       ///< (p-1)log(1+w)
  double discrepancy = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;  ///< 10 × combined solver tolerance
  bool agree = false;
};

/// The transformed nonlinearity λ(1+w)^{p-1}c(x)((p-1)log(1+w))^{q-1}/(p-1)^{p-1}.
ProblemSpec example2_transformed(const ProblemSpec& spec);

/// Solves the gradient-dependent problem directly and through w = e^{u/(p-1)} - 1,
/// then compares the two in sup-norm.  Refuses λ above min(printed, box).
Example2Result example2_driver(const ProblemSpec& spec, const TorsionData& td, const EigenPair& ep,
                               const SolveOptions& options = {});

}  // namespace plap
