#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseCholesky>

#include "plap/mesh.hpp"

namespace plap {

enum class SolverMethod {
  automatic,     ///< damped Newton, Gauss–Seidel sweeps when Newton stagnates
  gauss_seidel,  ///< nonlinear Gauss–Seidel only
};

struct SolverOptions {
  /// Target for the weak residual, scaled by min(1, max|rhs|).
  double tol = 1e-11;
  int max_newton = 200;
  int max_sweeps = 20000;
  double delta_start = 1e-2;
  double delta_floor = 1e-12;
  double delta_factor = 10.0;
  SolverMethod method = SolverMethod::automatic;
};

struct SolveStatus {
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;  ///< Newton steps
  int sweeps = 0;      ///< Gauss–Seidel sweeps
  double floor = 0.0;  ///< residual attainable in double precision at the iterate
};

/// Discrete -Δ_p with homogeneous Dirichlet data on one domain.
///
/// Solves -Δ_p u = rhs by minimizing (1/p)∫(|∇u|²+δ²)^{p/2} - ∫ rhs·u,
/// driving δ to its floor by continuation.  For p = 2 the factorization is
/// cached, so an instance must not be shared between threads.
class PLaplacian {
 public:
  PLaplacian(DomainPtr domain, double p, SolverOptions options = {});

  double p() const { return p_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  const SolverOptions& options() const { return options_; }

  /// Nodal values of -div(|∇u|^{p-2}∇u) at interior nodes (zero on the boundary).
  ScalarField apply(const ScalarField& u, double delta) const;

  /// `rhs` holds nodal source values; `guess` seeds the iteration.
  ScalarField solve(const Vector& rhs, SolveStatus& status, const Vector* guess = nullptr) const;

 private:
  using SparseMatrix = Eigen::SparseMatrix<double>;

  double energy(const Vector& u, const Vector& load, double delta) const;
  Vector gradient(const Vector& u, const Vector& load, double delta) const;
  SparseMatrix hessian(const Vector& u, double delta) const;
  bool newton(Vector& u, const Vector& load, double delta, double target, SolveStatus& status) const;
  void gauss_seidel(Vector& u, const Vector& load, double delta, double target,
                    SolveStatus& status) const;
  double interior_max(const Vector& r) const;
  double noise_floor(const SparseMatrix& H, const Vector& u, const Vector& load) const;

  DomainPtr domain_;
  double p_;
  SolverOptions options_;
  std::vector<Index> unknown_;                     // node -> unknown index, -1 on the boundary
  std::vector<std::vector<std::size_t>> touching_;  // node -> gradient samples
  mutable SparseMatrix linear_hessian_;
  mutable std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>> linear_factor_;
};

/// Nodal values of -Δ_p u (interior nodes), δ-regularized.
ScalarField apply_plap(const ScalarField& u, double p, double delta = 1e-10);

/// Torsion function of -Δ_p φ = ω and the constants derived from it.
struct TorsionData {
  ScalarField phi;
  std::shared_ptr<const Weight> weight;
  double p = 2.0;
  double sup_phi = 0.0;
  double sup_grad_phi = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;

  /// ‖φ‖∞^{1-p}
  double alpha() const;
  /// ‖∇φ‖∞ / ‖φ‖∞
  double mu() const;
};

TorsionData solve_torsion(const Weight& omega, double p, double tol = 1e-11);
TorsionData solve_torsion(const Weight& omega, double p, const SolverOptions& options);

struct OrderingReport {
  double min_gap = 0.0;  ///< min over nodes of (v - u)
  Index argmin = 0;
  bool ordered = false;
};

/// Checks u <= v nodewise, allowing a slack of 1e-12·‖v‖∞.
OrderingReport compare_fields(const ScalarField& u, const ScalarField& v, double relative_slack = 1e-12);

}  // namespace plap
