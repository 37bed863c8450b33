#include "plap/solve.hpp"

#include "plap/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace plap {

namespace {

double min_difference(const Vector& upper, const Vector& lower) { return (upper - lower).minCoeff(); }

}  // namespace

SolveReport frozen_gradient_solve(const ProblemSpec& spec, const SubSuperPair& pair, const SolveOptions& options,
                                  const ScalarField* initial) {
  if (!pair.ordered) throw std::invalid_argument("frozen_gradient_solve needs an ordered pair");
  if (!(options.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const PLaplacian op(spec.domain_ptr(), spec.p, options.inner);
  const Vector& sub = pair.sub.values();
  const Vector& super = pair.super.values();

  SolveReport rep(pair.sub);
  ScalarField u = initial != nullptr ? *initial : pair.sub;
  double sup_prev = sup_norm(u);
  bool fixed = false;
  int extra = 0;
  for (int k = 1; k <= options.max_iterations; ++k) {
    const Vector rhs = spec.evaluate(u).cwiseMax(0.0);
    SolveStatus status;
    ScalarField next = op.solve(rhs, status, &u.values());
    const double step = (next.values() - u.values()).cwiseAbs().maxCoeff();
    const double sup = sup_norm(next);
    rep.trace.push_back({sup, step, status.residual, status.floor});
    rep.iterations = k;
    if (!next.values().allFinite()) {
      rep.message = "iterate is not finite";
      break;
    }
    const double slack = options.sandwich_slack * std::max(sup, std::numeric_limits<double>::min());
    if (min_difference(next.values(), sub) < -slack || min_difference(super, next.values()) < -slack)
      rep.escaped = true;
    if (sup < sup_prev * (1.0 - 1e-12)) rep.monotone = false;
    sup_prev = sup;
    u = std::move(next);
    if (!status.converged) {
      std::ostringstream os;
      os << "inner solve stalled at iteration " << k << " with residual " << status.residual;
      rep.message = os.str();
      break;
    }
    if (step <= options.tol * sup) {
      // Near u = 0 a sublinear source amplifies tiny steps, so the full
      // residual is checked too; iterate on while the step still moves u.
      const Vector f = spec.evaluate(u);
      const double target = std::max(options.tol * f.cwiseAbs().maxCoeff(), 2.0 * status.floor);
      const bool small = weak_residual(u, f, spec.p, ResidualMode::absolute) <= target;
      if (small || step <= 64.0 * std::numeric_limits<double>::epsilon() * sup || ++extra > 1000) {
        fixed = true;
        break;
      }
    }
  }
  if (!fixed && rep.message.empty()) rep.message = "fixed-point iteration hit the iteration limit";

  rep.sup_u = sup_norm(u);
  const Vector f = spec.evaluate(u);
  rep.residual = weak_residual(u, f, spec.p, ResidualMode::absolute);
  const double floor = rep.trace.empty() ? 0.0 : rep.trace.back().floor;
  rep.residual_tol = std::max(options.tol * f.cwiseAbs().maxCoeff(), 2.0 * floor);
  rep.lower_margin = min_difference(u.values(), sub);
  rep.upper_margin = min_difference(super, u.values());
  const double slack = options.sandwich_slack * rep.sup_u;
  rep.sandwich_pass = !rep.escaped && rep.lower_margin >= -slack && rep.upper_margin >= -slack;
  rep.converged = fixed && rep.residual <= rep.residual_tol;
  if (fixed && !rep.converged) {
    std::ostringstream os;
    os << "fixed point reached but the full residual " << rep.residual << " exceeds " << rep.residual_tol;
    rep.message = os.str();
  }
  rep.solution = std::move(u);
  return rep;
}

ContinuationTrace continuation_q_to_p(const ProblemSpec& spec, const TorsionData& td, const EigenPair& ep,
                                      const ContinuationOptions& options) {
  if (spec.form != NonlinearityForm::two_parameter)
    throw std::invalid_argument("continuation needs the two-parameter form");
  const double p = spec.p;
  if (std::abs(spec.a + spec.b - (p - 1.0)) > 1e-12) throw std::invalid_argument("continuation needs a + b = p - 1");
  if (!(spec.q < p)) throw std::invalid_argument("continuation needs a base q below p");
  if (!(spec.lam > 0.0)) throw std::invalid_argument("continuation needs lambda > 0");

  ContinuationTrace trace;
  trace.alpha = td.alpha();
  trace.lambda1 = ep.lambda1;
  const double beta_max = trace.alpha / std::pow(td.mu(), spec.b);
  if (spec.beta < 0.0 || spec.beta >= beta_max) {
    std::ostringstream os;
    os << "beta = " << spec.beta << " violates 0 <= beta < alpha/mu^b = " << beta_max;
    throw ThresholdViolation(os.str(), beta_max);
  }
  trace.lower = trace.alpha - spec.beta * std::pow(td.mu(), spec.b);

  std::vector<double> schedule = options.schedule;
  if (schedule.empty())
    for (int n = 0; n < options.stages; ++n) schedule.push_back(p - (p - spec.q) * std::ldexp(1.0, -n));

  ScalarField profile = ep.u1;
  bool have_profile = false;
  trace.complete = true;
  for (std::size_t n = 0; n < schedule.size(); ++n) {
    const double q = schedule[n];
    if (!(q > 1.0) || !(q < p)) throw std::invalid_argument("schedule entries must lie in (1, p)");
    const double s = p - q;
    // Internal λ at which the stage solution has sup-norm close to one.
    const double lam_int = have_profile ? trace.stages.back().lambda_q : std::sqrt(trace.lower * trace.lambda1);
    const ProblemSpec stage = spec.with_q(q).with_lambda(lam_int);

    const double log_M = (std::log(lam_int) - std::log(trace.lower)) / s;
    const double log_eps = (std::log(lam_int) - std::log(trace.lambda1)) / s;
    if (std::abs(log_M) > 600.0 || std::abs(log_eps) > 600.0) {
      trace.complete = false;
      trace.message = "stage amplitudes leave the double range at q = " + format_real(q);
      break;
    }
    const double M = std::exp(log_M);
    const double eps = std::exp(log_eps);
    const SubSuperPair pair = make_pair(ep.u1.scaled(eps), scaled_torsion(td, M), eps, M);
    if (!pair.ordered) {
      trace.complete = false;
      trace.message = "sub/super pair not ordered at q = " + format_real(q);
      break;
    }
    ScalarField start = pair.sub;
    if (have_profile) {
      const Vector seed = profile.values().cwiseMax(pair.sub.values()).cwiseMin(pair.super.values());
      start = ScalarField(profile.domain_ptr(), seed, true);
    }
    const SolveReport rep = frozen_gradient_solve(stage, pair, options.solve, &start);

    ContinuationStage st;
    st.q = q;
    st.lambda_internal = lam_int;
    st.iterations = rep.iterations;
    st.residual = rep.residual;
    st.sandwich_pass = rep.sandwich_pass;
    if (!rep.converged || !(rep.sup_u > 0.0)) {
      trace.complete = false;
      trace.message = "stage q = " + format_real(q) + " did not converge: " + rep.message;
      break;
    }
    const double log_sup = std::log(rep.sup_u);
    st.log_sup_v = log_sup + (std::log(spec.lam) - std::log(lam_int)) / s;
    st.sup_v = std::exp(st.log_sup_v);
    st.lambda_q = lam_int * std::exp(-s * log_sup);
    profile = rep.solution.scaled(1.0 / rep.sup_u);
    have_profile = true;
    st.sup_grad = sup_norm(grad_magnitude(profile));
    st.in_bounds = st.lambda_q >= trace.lower - options.bound_tol && st.lambda_q <= trace.lambda1 + options.bound_tol;
    trace.stages.push_back(st);
  }

  const auto& stages = trace.stages;
  if (stages.empty()) return trace;
  trace.u_beta = profile;
  const std::size_t m = stages.size();
  const double last = stages[m - 1].lambda_q;
  if (m >= 3) {
    const double l1 = stages[m - 2].lambda_q, l2 = stages[m - 3].lambda_q;
    trace.lambda_beta = (8.0 * last - 6.0 * l1 + l2) / 3.0;
    trace.lambda_beta_error = std::abs(trace.lambda_beta - (2.0 * last - l1));
  } else if (m == 2) {
    trace.lambda_beta = 2.0 * last - stages[0].lambda_q;
    trace.lambda_beta_error = std::abs(trace.lambda_beta - last);
  } else {
    trace.lambda_beta = last;
    trace.lambda_beta_error = std::numeric_limits<double>::infinity();
  }
  trace.bounds_hold = std::all_of(stages.begin(), stages.end(), [](const auto& s) { return s.in_bounds; });
  trace.strict_gap = trace.lambda_beta < trace.lambda1 * (1.0 - 1e-6);
  std::vector<double> grads;
  for (const auto& s : stages) grads.push_back(s.sup_grad);
  std::vector<double> sorted = grads;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.size() % 2 == 1
                            ? sorted[sorted.size() / 2]
                            : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  trace.gradient_bounded = sorted.back() <= 10.0 * median;
  return trace;
}

HomogeneityReport homogeneity_check(const ScalarField& u, const ProblemSpec& spec, double k) {
  if (std::abs(spec.q - spec.p) > 1e-14) throw std::invalid_argument("homogeneity check needs q = p");
  if (spec.form == NonlinearityForm::two_parameter && std::abs(spec.a + spec.b - (spec.p - 1.0)) > 1e-12)
    throw std::invalid_argument("homogeneity check needs a + b = p - 1");
  if (k < 0.0) throw std::invalid_argument("homogeneity factor must be nonnegative");
  HomogeneityReport rep;
  rep.k = k;
  rep.residual_u = weak_residual(u, spec.evaluate(u), spec.p, ResidualMode::absolute);
  const ScalarField ku = u.scaled(k);
  rep.residual_ku = weak_residual(ku, spec.evaluate(ku), spec.p, ResidualMode::absolute);
  rep.difference = std::abs(rep.residual_ku - std::pow(k, spec.p - 1.0) * rep.residual_u);
  return rep;
}

std::string to_string(ProbeVerdict verdict) {
  switch (verdict) {
    case ProbeVerdict::grows:
      return "grows";
    case ProbeVerdict::collapses:
      return "collapses";
    case ProbeVerdict::anomaly:
      return "anomaly";
    case ProbeVerdict::neutral:
      return "neutral";
  }
  return "neutral";
}

ProbeReport nonexistence_probe(const ProblemSpec& spec, const EigenPair& ep, const ProbeOptions& options) {
  if (std::abs(spec.q - spec.p) > 1e-14) throw std::invalid_argument("nonexistence probe needs q = p");
  ProbeReport rep;
  rep.seed = options.seed;
  rep.ratio = spec.lam / ep.lambda1;
  rep.predicted = std::pow(rep.ratio, 1.0 / (spec.p - 1.0));

  const DomainPtr& domain = spec.domain_ptr();
  const PLaplacian op(domain, spec.p, SolverOptions{1e-12});
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> draw(0.1, 1.0);
  for (int s = 0; s < options.starts; ++s) {
    Vector v = Vector::Zero(domain->size());
    for (Index i : domain->interior()) v[i] = draw(rng);
    ScalarField u(domain, v, true);
    ProbeStart start;
    start.sup_norms.push_back(sup_norm(u));
    double shape_change = std::numeric_limits<double>::infinity();
    for (int k = 0; k < options.iterations; ++k) {
      SolveStatus status;
      ScalarField next = op.solve(spec.evaluate(u).cwiseMax(0.0), status, &u.values());
      const double sup = sup_norm(next);
      if (!std::isfinite(sup) || sup == 0.0) break;
      shape_change = (next.values() / sup - u.values() / start.sup_norms.back()).cwiseAbs().maxCoeff();
      start.growth.push_back(sup / start.sup_norms.back());
      start.sup_norms.push_back(sup);
      u = std::move(next);
      if (sup > options.cap || sup < 1.0 / options.cap) break;
    }
    start.final_growth = start.growth.empty() ? 1.0 : start.growth.back();
    if (start.final_growth > 1.0 + 1e-3)
      start.verdict = ProbeVerdict::grows;
    else if (start.final_growth < 1.0 - 1e-3)
      start.verdict = ProbeVerdict::collapses;
    else if (std::abs(start.final_growth - 1.0) < 1e-6 && shape_change < 1e-8)
      start.verdict = ProbeVerdict::anomaly;
    else
      start.verdict = ProbeVerdict::neutral;
    rep.starts.push_back(std::move(start));
  }
  if (!rep.starts.empty()) {
    rep.verdict = rep.starts.front().verdict;
    for (const auto& s : rep.starts) {
      if (s.verdict == ProbeVerdict::anomaly) {
        rep.verdict = ProbeVerdict::anomaly;
        break;
      }
      if (s.verdict != rep.verdict) rep.verdict = ProbeVerdict::neutral;
    }
  }
  return rep;
}

}  // namespace plap
