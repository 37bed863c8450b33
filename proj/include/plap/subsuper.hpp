#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "plap/eigenpair.hpp"
#include "plap/plap.hpp"
#include "plap/problem.hpp"

namespace plap {

struct SubSuperPair {
  ScalarField sub;
  ScalarField super;
  double eps = 0.0;
  double M = 0.0;
  bool ordered = false;
  double margin = 0.0;  ///< min(super - sub)
};

/// Orders the two fields with compare_fields and fills the pair.
SubSuperPair make_pair(ScalarField sub, ScalarField super, double eps, double M);

struct SuperSolution {
  ScalarField field;  ///< M φ / ‖φ‖∞
  double M = 0.0;
  double identity_error = 0.0;  ///< relative defect of αM^{p-1} = λM^{q-1} + βμ^b M^{a+b}
};

/// M φ/‖φ‖∞ scaled from the torsion function.
ScalarField scaled_torsion(const TorsionData& td, double M);

/// U = Mφ/‖φ‖∞ with M = (λ/(α - βμ^b))^{1/(p-q)}; needs a + b = p - 1,
/// 1 < q < p.  Throws ThresholdViolation when β >= α/μ^b and
/// std::overflow_error when M exceeds 1e12.
SuperSolution supersolution_two_param(const ProblemSpec& spec, const TorsionData& td);

/// Unique positive root of αM^{p-1} = λM^{q-1} + βμ^b M^{a+b} for a + b < p - 1.
double solve_M_root(const ProblemSpec& spec, const TorsionData& td);

/// g(M) = αM^{p-1} - λM^{q-1} - βμ^b M^{a+b}
double M_root_defect(const ProblemSpec& spec, const TorsionData& td, double M);

struct SubSolution {
  ScalarField field;  ///< ε u₁
  double eps = 0.0;
  double defect = 0.0;  ///< weak_residual in sub mode (<= tolerance certifies)
  double tolerance = 0.0;
};

/// ε u₁ with ε = (λ/λ₁)^{1/(p-q)} for the sublinear forms (λc₀ in place of λ for example 2), or the supplied
/// ε (> 0) for any form.  Verifies the sub-solution weak inequality and throws
/// HypothesisFailure, naming the worst node, when it fails.
SubSolution subsolution_eps(const ProblemSpec& spec, const EigenPair& ep, double eps = 0.0);

/// Sampling lattice for the hypothesis certificates.
struct Sampling {
  int u_points = 64;
  int v_points = 33;
  int node_stride = 1;
  int levels = 6;       ///< H1: number of doublings of the gradient range
  double v_start = 1.0; ///< H1: initial gradient range
};

struct Witness {
  Index node = 0;
  double u = 0.0;
  double v = 0.0;
};

struct HypothesisReport {
  std::string hypothesis;
  bool pass = false;
  double margin = 0.0;
  Witness witness;
  Sampling resolution;
  double value = 0.0;  ///< C for H1, ε₀ for H2, M for H3
  std::vector<double> levels;
};

nlohmann::json to_json(const HypothesisReport& report);

/// Smallest C with f <= C(1 + v^p) over |u| <= Mcap and each gradient range
/// v_start·2^k; flags C that keeps growing with the range.
HypothesisReport check_H1(const ProblemSpec& spec, double Mcap, const Sampling& sampling = {});

/// Largest ε₀ in 1, 1/2, ..., 2^{-40} with f(x,u,v) >= λ₁ω(x)u^{p-1} for
/// 0 < u <= ε₀, |v| <= μ·Mcap.  ε₀ = 0 when none passes.
HypothesisReport check_H2(const ProblemSpec& spec, const EigenPair& ep, double mu, double Mcap,
                          const Sampling& sampling = {});

/// 0 <= f(x,u,v) <= αω(x)Mcap^{p-1} on Ω̄ × [0, Mcap] × B_{μMcap}.  The
/// margin is normalized by α·max(ω)·Mcap^{p-1}.
HypothesisReport check_H3(const ProblemSpec& spec, const TorsionData& td, double Mcap,
                          const Sampling& sampling = {});

/// ½ min{ε₀, Mcap, μ·Mcap/‖∇u₁‖∞}
double abstract_epsilon(double eps0, double Mcap, double mu, const EigenPair& ep);

}  // namespace plap
