#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "plap/mesh.hpp"

namespace plap {

/// A parameter choice that sits outside the admissible range (for instance
/// β >= α/μ^b, or λ above an existence threshold).
class ThresholdViolation : public std::domain_error {
 public:
  ThresholdViolation(const std::string& what, double bound) : std::domain_error(what), bound_(bound) {}
  double bound() const { return bound_; }

 private:
  double bound_;
};

/// A sampled hypothesis or a sub/super-solution inequality does not hold.
class HypothesisFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NonlinearityForm {
  two_parameter,  ///< λω₁u^{q-1} + βω₂u^a|∇u|^b
  abstract,       ///< user evaluator f(x, u, |∇u|)
  example1,       ///< λωu^{q-1}(1 + |∇u|^p)
  example2,       ///< λc(x)u^{q-1} + |∇u|^p
};

std::string to_string(NonlinearityForm form);

/// f evaluated at a grid node for a value u >= 0 and gradient magnitude v.
using Evaluator = std::function<double(Index node, double u, double v)>;

/// Exponents, parameters, weights, and the nonlinearity of
/// -Δ_p u = f(x, u, ∇u), u = 0 on the boundary.
struct ProblemSpec {
  double p = 2.0;
  double q = 1.5;
  double a = 0.5;
  double b = 0.5;
  double lam = 1.0;
  double beta = 0.0;
  std::shared_ptr<const Weight> omega1;
  std::shared_ptr<const Weight> omega2;
  /// Nodewise max(ω₁, ω₂); the weight of the torsion problem.
  std::shared_ptr<const Weight> omega;
  NonlinearityForm form = NonlinearityForm::two_parameter;
  Evaluator custom;
  /// Example-2 coefficient c(x), with c0 <= c(x) <= c1.
  std::shared_ptr<const ScalarField> coefficient;
  double c0 = 1.0;
  double c1 = 1.0;

  static ProblemSpec two_parameter(double p, double q, double a, double b, double lam, double beta,
                                   const Weight& omega1, const Weight& omega2);
  static ProblemSpec example1(double p, double q, double lam, const Weight& omega);
  /// Weight ω ≡ 1; `coefficient` must satisfy c0 <= c <= c1 nodewise.
  static ProblemSpec example2(double p, double q, double lam, const ScalarField& coefficient, double c0,
                              double c1);
  static ProblemSpec abstract(double p, const Weight& omega, Evaluator f);

  const Domain& domain() const { return omega->domain(); }
  const DomainPtr& domain_ptr() const { return omega->field().domain_ptr(); }

  /// Throws std::invalid_argument on a broken invariant.
  void validate() const;

  double f(Index node, double u, double v) const;
  Evaluator evaluator() const;
  /// f(x, u, |∇u|) at every node, with u clamped at zero from below.
  Vector evaluate(const ScalarField& u) const;

  /// Same problem with different λ / q.
  ProblemSpec with_lambda(double lam) const;
  ProblemSpec with_q(double q) const;
};

}  // namespace plap
