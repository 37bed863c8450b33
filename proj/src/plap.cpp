#include "plap/plap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plap {

PLaplacian::PLaplacian(DomainPtr domain, double p, SolverOptions options)
    : domain_(std::move(domain)), p_(p), options_(options) {
  if (!(p_ > 1.0)) throw std::invalid_argument("p must exceed 1");
  const Domain& d = *domain_;
  unknown_.assign(static_cast<std::size_t>(d.size()), -1);
  Index k = 0;
  for (Index i : d.interior()) unknown_[static_cast<std::size_t>(i)] = k++;
  touching_.assign(static_cast<std::size_t>(d.size()), {});
  const auto& samples = d.gradient_samples();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (int c = 0; c < samples[s].components; ++c) {
      for (Index n : {samples[s].plus[c], samples[s].minus[c]}) {
        auto& list = touching_[static_cast<std::size_t>(n)];
        if (list.empty() || list.back() != s) list.push_back(s);
      }
    }
  }
}

ScalarField PLaplacian::apply(const ScalarField& u, double delta) const {
  const Domain& d = *domain_;
  Vector out = flux_divergence(d, u.values(), p_, delta);
  for (Index i = 0; i < out.size(); ++i) out[i] = d.is_boundary(i) ? 0.0 : out[i] / d.mass()[i];
  return ScalarField(domain_, std::move(out), false);
}

double PLaplacian::energy(const Vector& u, const Vector& load, double delta) const {
  return gradient_energy(*domain_, u, p_, delta) - load.dot(u);
}

Vector PLaplacian::gradient(const Vector& u, const Vector& load, double delta) const {
  Vector g = flux_divergence(*domain_, u, p_, delta) - load;
  for (Index i = 0; i < g.size(); ++i)
    if (domain_->is_boundary(i)) g[i] = 0.0;
  return g;
}

double PLaplacian::interior_max(const Vector& r) const {
  double m = 0.0;
  for (Index i : domain_->interior()) m = std::max(m, std::abs(r[i]));
  return m;
}

PLaplacian::SparseMatrix PLaplacian::hessian(const Vector& u, double delta) const {
  const Domain& d = *domain_;
  const double inv_h = 1.0 / d.h();
  const double d2 = delta * delta;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(d.gradient_samples().size() * 16);
  for (const auto& smp : d.gradient_samples()) {
    double g[2] = {0.0, 0.0};
    double norm2 = d2;
    for (int k = 0; k < smp.components; ++k) {
      g[k] = (u[smp.plus[k]] - u[smp.minus[k]]) * inv_h;
      norm2 += g[k] * g[k];
    }
    if (norm2 == 0.0 && p_ != 2.0) continue;
    // Hessian of (1/p)(|g|²+δ²)^{p/2} in g: s·I + (p-2)·t·g gᵀ.
    const double s = p_ == 2.0 ? 1.0 : std::pow(norm2, 0.5 * (p_ - 2.0));
    const double t = p_ == 2.0 ? 0.0 : (p_ - 2.0) * s / norm2;
    const double w = smp.weight * inv_h * inv_h;
    for (int a = 0; a < smp.components; ++a) {
      for (int b = 0; b < smp.components; ++b) {
        const double hab = w * ((a == b ? s : 0.0) + t * g[a] * g[b]);
        if (hab == 0.0) continue;
        const Index na[2] = {smp.plus[a], smp.minus[a]};
        const Index nb[2] = {smp.plus[b], smp.minus[b]};
        for (int ia = 0; ia < 2; ++ia) {
          const Index ra = unknown_[static_cast<std::size_t>(na[ia])];
          if (ra < 0) continue;
          for (int ib = 0; ib < 2; ++ib) {
            const Index cb = unknown_[static_cast<std::size_t>(nb[ib])];
            if (cb < 0) continue;
            const double sign = (ia == ib) ? 1.0 : -1.0;
            triplets.emplace_back(ra, cb, sign * hab);
          }
        }
      }
    }
  }
  const auto n = static_cast<Index>(d.interior().size());
  SparseMatrix H(n, n);
  H.setFromTriplets(triplets.begin(), triplets.end());
  return H;
}

double PLaplacian::noise_floor(const SparseMatrix& H, const Vector& u, const Vector& load) const {
  // Residual perturbation caused by rounding u to working precision.
  const auto& interior = domain_->interior();
  Vector ux(static_cast<Index>(interior.size()));
  for (std::size_t k = 0; k < interior.size(); ++k) ux[static_cast<Index>(k)] = std::abs(u[interior[k]]);
  Vector spread = Vector::Zero(ux.size());
  for (Index col = 0; col < H.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(H, col); it; ++it) spread[it.row()] += std::abs(it.value()) * ux[col];
  double worst = 0.0;
  for (std::size_t k = 0; k < interior.size(); ++k)
    worst = std::max(worst, spread[static_cast<Index>(k)] + std::abs(load[interior[k]]));
  return 16.0 * std::numeric_limits<double>::epsilon() * worst;
}

bool PLaplacian::newton(Vector& u, const Vector& load, double delta, double target,
                        SolveStatus& status) const {
  const Domain& d = *domain_;
  const auto& interior = d.interior();
  const auto n = static_cast<Index>(interior.size());
  const bool linear = (p_ == 2.0);
  Vector grad = gradient(u, load, delta);
  double res = interior_max(grad);
  double window_best = res;
  int window = 0;
  for (int it = 0; it < options_.max_newton; ++it) {
    if (res <= target) return true;
    Vector rhs(n);
    for (Index k = 0; k < n; ++k) rhs[k] = -grad[interior[static_cast<std::size_t>(k)]];

    Vector step;
    if (linear) {
      if (!linear_factor_) {
        linear_hessian_ = hessian(u, delta);
        linear_factor_ = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>(linear_hessian_);
      }
      status.floor = noise_floor(linear_hessian_, u, load);
      step = linear_factor_->solve(rhs);
    } else {
      SparseMatrix H = hessian(u, delta);
      status.floor = noise_floor(H, u, load);
      Eigen::SimplicialLDLT<SparseMatrix> ldlt(H);
      double shift = 0.0;
      while (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
        // Degenerate gradients can leave the Hessian numerically singular.
        shift = shift == 0.0 ? 1e-12 * H.diagonal().cwiseAbs().maxCoeff() : 10.0 * shift;
        SparseMatrix shifted = H;
        for (Index k = 0; k < n; ++k) shifted.coeffRef(k, k) += shift;
        ldlt.compute(shifted);
        if (shift > 1e6 * H.diagonal().cwiseAbs().maxCoeff()) return false;
      }
      step = ldlt.solve(rhs);
    }
    if (res <= std::max(target, status.floor)) return true;
    ++status.iterations;

    Vector full_step = Vector::Zero(u.size());
    for (Index k = 0; k < n; ++k) full_step[interior[static_cast<std::size_t>(k)]] = step[k];

    const double e0 = energy(u, load, delta);
    const double slope = grad.dot(full_step);
    double t = 1.0;
    bool accepted = false;
    Vector trial;
    Vector trial_grad;
    double trial_res = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      trial = u + t * full_step;
      const double e1 = energy(trial, load, delta);
      trial_grad = gradient(trial, load, delta);
      trial_res = interior_max(trial_grad);
      // Near the minimizer the energy decrease drowns in roundoff, so a step
      // that reduces the residual is accepted as well.
      if ((std::isfinite(e1) && e1 <= e0 + 1e-4 * t * slope) || trial_res < res) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return false;
    u = std::move(trial);
    grad = std::move(trial_grad);
    res = trial_res;
    if (res < 0.5 * window_best) {
      window_best = res;
      window = 0;
    } else if (++window >= 12) {
      return res <= std::max(target, status.floor);
    }
  }
  return res <= std::max(target, status.floor);
}

void PLaplacian::gauss_seidel(Vector& u, const Vector& load, double delta, double target,
                              SolveStatus& status) const {
  const Domain& d = *domain_;
  const auto& samples = d.gradient_samples();
  const double inv_h = 1.0 / d.h();
  const double d2 = delta * delta;

  // Local residual of node i and its derivative with respect to u_i.
  const auto local = [&](Index i, double& deriv) {
    double r = -load[i];
    deriv = 0.0;
    for (std::size_t s : touching_[static_cast<std::size_t>(i)]) {
      const auto& smp = samples[s];
      double g[2] = {0.0, 0.0};
      double sigma[2] = {0.0, 0.0};
      double norm2 = d2;
      for (int k = 0; k < smp.components; ++k) {
        g[k] = (u[smp.plus[k]] - u[smp.minus[k]]) * inv_h;
        sigma[k] = (smp.plus[k] == i ? 1.0 : 0.0) - (smp.minus[k] == i ? 1.0 : 0.0);
        norm2 += g[k] * g[k];
      }
      if (norm2 == 0.0 && p_ != 2.0) continue;
      const double sc = p_ == 2.0 ? 1.0 : std::pow(norm2, 0.5 * (p_ - 2.0));
      const double tc = p_ == 2.0 ? 0.0 : (p_ - 2.0) * sc / norm2;
      double proj = 0.0;
      double sig2 = 0.0;
      for (int k = 0; k < smp.components; ++k) {
        r += smp.weight * inv_h * sc * sigma[k] * g[k];
        proj += sigma[k] * g[k];
        sig2 += sigma[k] * sigma[k];
      }
      deriv += smp.weight * inv_h * inv_h * (sc * sig2 + tc * proj * proj);
    }
    return r;
  };

  double last_check = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < options_.max_sweeps; ++sweep) {
    for (Index i : d.interior()) {
      for (int inner = 0; inner < 30; ++inner) {
        double deriv = 0.0;
        const double r = local(i, deriv);
        if (r == 0.0 || !(deriv > 0.0)) break;
        const double u0 = u[i];
        double step = -r / deriv;
        // Damp until the local residual shrinks; the local problem is convex.
        for (int k = 0; k < 40; ++k) {
          u[i] = u0 + step;
          double dd = 0.0;
          if (std::abs(local(i, dd)) < std::abs(r)) break;
          step *= 0.5;
        }
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(u0))) break;
      }
    }
    ++status.sweeps;
    if (sweep % 10 == 9 || sweep + 1 == options_.max_sweeps) {
      const double res = interior_max(gradient(u, load, delta));
      if (res <= std::max(target, status.floor)) return;
      if (res > 0.9 * last_check) return;
      last_check = res;
    }
  }
}

ScalarField PLaplacian::solve(const Vector& rhs, SolveStatus& status, const Vector* guess) const {
  const Domain& d = *domain_;
  if (rhs.size() != d.size()) throw std::invalid_argument("right-hand side size mismatch");
  status = SolveStatus{};
  const double scale = rhs.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    status.converged = true;
    return ScalarField::zeros(domain_);
  }
  // -Δ_p(sw) = s^{p-1}(-Δ_p w): solve for w = u/s with a unit load so that δ
  // and the noise floor are measured against the size of the solution.
  const double s_u = std::exp(std::log(scale) / (p_ - 1.0));
  if (!std::isfinite(s_u) || s_u == 0.0) throw std::overflow_error("solution scale outside double range");
  const double target = options_.tol * std::min(1.0, scale) / scale;
  const Vector load = d.mass().cwiseProduct(rhs) / scale;

  Vector u = Vector::Zero(d.size());
  if (guess != nullptr && guess->size() == d.size() && guess->allFinite()) {
    u = *guess / s_u;
    for (Index i = 0; i < u.size(); ++i)
      if (d.is_boundary(i)) u[i] = 0.0;
  }

  std::vector<double> deltas;
  if (p_ == 2.0) {
    deltas.push_back(0.0);
  } else {
    for (double delta = options_.delta_start; delta > options_.delta_floor * 1.0000001;
         delta /= options_.delta_factor)
      deltas.push_back(delta);
    deltas.push_back(options_.delta_floor);
  }

  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double delta = deltas[k];
    const bool last = (k + 1 == deltas.size());
    // Intermediate continuation stages only need a good starting point.
    const double stage_target = last ? target : std::max(target, 1e-3 * delta);
    bool ok = false;
    if (options_.method == SolverMethod::automatic) ok = newton(u, load, delta, stage_target, status);
    if (!ok) {
      gauss_seidel(u, load, delta, stage_target, status);
      if (options_.method == SolverMethod::automatic) newton(u, load, delta, stage_target, status);
    }
  }

  status.residual = interior_max(gradient(u, load, 0.0));
  status.converged = status.residual <= std::max(target, status.floor);
  if (!status.converged) {
    // The regularization floor itself may hold the unregularized residual up.
    const double reg = interior_max(gradient(u, load, deltas.back()));
    status.converged = reg <= std::max(target, status.floor) && status.residual <= 10.0 * target;
  }
  status.residual *= scale;
  status.floor *= scale;
  return ScalarField(domain_, u * s_u, true);
}

ScalarField apply_plap(const ScalarField& u, double p, double delta) {
  return PLaplacian(u.domain_ptr(), p).apply(u, delta);
}

double TorsionData::alpha() const { return std::pow(sup_phi, 1.0 - p); }

double TorsionData::mu() const { return sup_grad_phi / sup_phi; }

TorsionData solve_torsion(const Weight& omega, double p, double tol) {
  SolverOptions options;
  options.tol = tol;
  return solve_torsion(omega, p, options);
}

TorsionData solve_torsion(const Weight& omega, double p, const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const PLaplacian op(omega.field().domain_ptr(), p, options);
  SolveStatus status;
  ScalarField phi = op.solve(omega.values(), status);
  TorsionData td{std::move(phi), std::make_shared<const Weight>(omega)};
  td.p = p;
  td.sup_phi = sup_norm(td.phi);
  td.sup_grad_phi = sup_norm(grad_magnitude(td.phi));
  td.residual = status.residual;
  td.iterations = status.iterations + status.sweeps;
  td.converged = status.converged;
  for (Index i : td.phi.domain().interior())
    if (!(td.phi[i] > 0.0)) td.converged = false;
  return td;
}

OrderingReport compare_fields(const ScalarField& u, const ScalarField& v, double relative_slack) {
  if (&u.domain() != &v.domain() && u.size() != v.size())
    throw std::invalid_argument("fields live on different domains");
  const Vector gap = v.values() - u.values();
  OrderingReport report;
  report.min_gap = gap.minCoeff(&report.argmin);
  report.ordered = report.min_gap >= -relative_slack * sup_norm(v);
  return report;
}

}  // namespace plap
