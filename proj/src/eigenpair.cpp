#include "plap/eigenpair.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace plap {

EigenPair principal_eigenpair(const Weight& omega, double p, double tol) {
  EigenOptions options;
  options.tol = tol;
  return principal_eigenpair(omega, p, options);
}

EigenPair principal_eigenpair(const Weight& omega, double p, const EigenOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const DomainPtr& domain = omega.field().domain_ptr();
  const PLaplacian op(domain, p, options.inner);

  SolveStatus status;
  const ScalarField phi = op.solve(omega.values(), status);
  Vector u = phi.values() / sup_norm(phi);

  EigenPair ep{ScalarField(domain, u, true), std::make_shared<const Weight>(omega), 0.0, p, 0.0, 0, false, {}};
  double previous = std::numeric_limits<double>::quiet_NaN();
  Vector guess = phi.values();
  for (int k = 0; k < options.max_iterations; ++k) {
    const Vector rhs = omega.values().cwiseProduct(u.array().max(0.0).pow(p - 1.0).matrix());
    const ScalarField w = op.solve(rhs, status, &guess);
    const double s = sup_norm(w);
    if (!(s > 0.0)) break;
    const double lambda = std::pow(s, 1.0 - p);
    u = w.values() / s;
    guess = w.values();
    ep.trace.push_back(lambda);
    ep.iterations = k + 1;
    ep.lambda1 = lambda;
    if (std::abs(lambda - previous) < options.tol * lambda) {
      ep.converged = status.converged;
      break;
    }
    previous = lambda;
  }

  ep.u1 = ScalarField(domain, std::move(u), true);
  const Vector rhs =
      ep.lambda1 * omega.values().cwiseProduct(ep.u1.values().array().max(0.0).pow(p - 1.0).matrix());
  ep.residual = weak_residual(ep.u1, rhs, p);
  for (Index i : domain->interior())
    if (!(ep.u1[i] > 0.0)) ep.converged = false;
  return ep;
}

GapReport check_alpha_lt_lambda1(const TorsionData& td, const EigenPair& ep) {
  if (td.phi.size() != ep.u1.size()) throw std::invalid_argument("torsion and eigenpair differ in domain");
  GapReport r;
  r.alpha = td.alpha();
  r.lambda1 = ep.lambda1;
  r.gap = r.lambda1 - r.alpha;
  r.holds = r.alpha <= r.lambda1;
  return r;
}

bool ordering_inequality(double alpha, double lambda1, double lam, double p, double q) {
  if (!(q > 1.0) || !(q < p)) throw std::invalid_argument("ordering inequality needs 1 < q < p");
  if (!(lam > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(alpha > 0.0) || alpha > lambda1 * (1.0 + 1e-14))
    throw std::invalid_argument("ordering inequality needs 0 < alpha <= lambda1");
  const double e = (p - 1.0) / (p - q);
  const double lhs = std::log(lambda1) + e * (std::log(lam) - std::log(lambda1));
  const double rhs = std::log(alpha) + e * (std::log(lam) - std::log(alpha));
  return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs));
}

}  // namespace plap
