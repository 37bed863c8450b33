#pragma once

#include <memory>
#include <vector>

#include "plap/plap.hpp"

namespace plap {

/// Principal Dirichlet eigenpair of -Δ_p with weight ω, ‖u₁‖∞ = 1.
struct EigenPair {
  ScalarField u1;
  std::shared_ptr<const Weight> weight;
  double lambda1 = 0.0;
  double p = 2.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  ///< λ estimate per iteration
};

struct EigenOptions {
  double tol = 1e-10;  ///< relative change of successive λ estimates
  int max_iterations = 500;
  SolverOptions inner{1e-12};
};

/// Inverse power iteration started from the normalized torsion function.
/// Each step solves -Δ_p w = ω u^{p-1}; λ is read off as ‖w‖∞^{1-p}.
EigenPair principal_eigenpair(const Weight& omega, double p, const EigenOptions& options = {});
EigenPair principal_eigenpair(const Weight& omega, double p, double tol);

struct GapReport {
  double alpha = 0.0;
  double lambda1 = 0.0;
  double gap = 0.0;  ///< λ₁ - α
  bool holds = false;  ///< α <= λ₁
};

GapReport check_alpha_lt_lambda1(const TorsionData& td, const EigenPair& ep);

/// λ₁(λ/λ₁)^{(p-1)/(p-q)} <= α(λ/α)^{(p-1)/(p-q)}, compared in log form.
/// Requires 1 < q < p, λ > 0 and 0 < α <= λ₁.
bool ordering_inequality(double alpha, double lambda1, double lam, double p, double q);

}  // namespace plap
