#include "plap/apps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plap {

namespace {

void require_sublinear(double p, double q) {
  if (!(q > 1.0) || !(q < p)) throw std::invalid_argument("thresholds need 1 < q < p");
}

ThresholdReport base_report(const ProblemSpec& spec, const TorsionData& td, const EigenPair& ep) {
  ThresholdReport r;
  r.alpha = td.alpha();
  r.mu = td.mu();
  r.lambda1 = ep.lambda1;
  r.beta_max = r.alpha / std::pow(r.mu, spec.b);
  r.lambda = spec.lam;
  r.beta = spec.beta;
  return r;
}

}  // namespace

double example1_log_H(double M, double p, double q, double mu) {
  return (q - p) * std::log(M) + std::log1p(std::exp(p * (std::log(mu) + std::log(M))));
}

Example1Thresholds example1_thresholds(double p, double q, double alpha, double mu) {
  require_sublinear(p, q);
  if (!(alpha > 0.0) || !(mu > 0.0)) throw std::invalid_argument("alpha and mu must be positive");
  Example1Thresholds t;
  const double s = p - q;
  // p/q - 1 = (p - q)/q keeps its relative accuracy as q → p.
  const double log_ratio = std::log(s) - std::log(q);
  t.M_star = std::exp(log_ratio / p - std::log(mu));
  t.lambda_star = std::exp(std::log(alpha) - s * std::log(mu) + (s / p) * log_ratio + std::log(q / p));
  const double log_H = example1_log_H(t.M_star, p, q, mu);
  t.H_min = std::exp(log_H);
  const double check = std::exp(std::log(alpha) - log_H);
  t.cross_check = std::abs(check - t.lambda_star) / t.lambda_star;
  if (t.cross_check > 1e-12) {
    std::ostringstream os;
    os << "lambda_* = " << t.lambda_star << " disagrees with alpha/H(M_*) = " << check;
    throw std::runtime_error(os.str());
  }

  // Golden-section search for the minimizer of log H over log M.
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(1e-6), hi = std::log(1e6);
  const auto h = [&](double t) { return example1_log_H(std::exp(t), p, q, mu); };
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = h(x1), f2 = h(x2);
  while (hi - lo > 1e-9) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = h(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = h(x2);
    }
  }
  const double t_g = 0.5 * (lo + hi);
  t.golden_M = std::exp(t_g);
  // log H is flat at the minimum, so only its value is sharp: M is good to ~1e-7.
  t.minimizer_confirmed = h(t_g) >= log_H - 1e-12 && std::abs(t_g - std::log(t.M_star)) <= 1e-6;
  return t;
}

Example2Thresholds example2_thresholds(double c1, double p, double q, double alpha, double mu) {
  require_sublinear(p, q);
  if (!(c1 > 0.0)) throw std::invalid_argument("c1 must be positive");
  if (!(alpha > 0.0) || !(mu > 0.0)) throw std::invalid_argument("alpha and mu must be positive");
  Example2Thresholds t;
  const double s = p - q;
  const double log_a = std::log(s) - p * std::log(mu);  // log((p-q)/μ^p)
  const double log_b = std::log(alpha) - std::log1p(s);  // log(α/(p-q+1))
  t.printed = std::exp(s * (log_a + log_b)) / c1;
  // λc₁M^{q-1} + (μM)^p <= αM^{p-1}  <=>  λ <= (αM^s - μ^p M^{s+1})/c₁, maximal at M = sα/((s+1)μ^p).
  t.M_box = std::exp(log_a + log_b);
  t.box = std::exp(s * (log_a + log_b) + log_b) / c1;
  t.admissible = std::min(t.printed, t.box);
  return t;
}

Example1Result example1_driver(const ProblemSpec& spec, const TorsionData& td, const EigenPair& ep,
                               const SolveOptions& options, double bracket_slack) {
  if (spec.form != NonlinearityForm::example1) throw std::invalid_argument("example1_driver needs the example-1 form");
  const double p = spec.p, q = spec.q, s = p - q;
  Example1Result res;
  res.report = base_report(spec, td, ep);
  res.thresholds = example1_thresholds(p, q, res.report.alpha, res.report.mu);
  res.report.lambda_star = res.thresholds.lambda_star;
  res.report.M_star = res.thresholds.M_star;
  res.report.admissible = spec.lam > 0.0 && spec.lam <= res.thresholds.lambda_star;
  if (!res.report.admissible) {
    std::ostringstream os;
    os << "lambda = " << spec.lam << " is outside (0, lambda_*] with lambda_* = " << res.thresholds.lambda_star;
    res.report.verdict = os.str();
    throw ThresholdViolation(os.str(), res.thresholds.lambda_star);
  }
  res.report.verdict = "admissible";

  const double M = res.thresholds.M_star;
  res.H1 = check_H1(spec, M);
  res.H2 = check_H2(spec, ep, res.report.mu, M);
  res.H3 = check_H3(spec, td, M);
  if (!res.H1.pass || !res.H2.pass || !res.H3.pass) {
    const HypothesisReport& bad = !res.H1.pass ? res.H1 : !res.H2.pass ? res.H2 : res.H3;
    std::ostringstream os;
    os << bad.hypothesis << " fails with margin " << bad.margin << " at node " << bad.witness.node
       << ", u = " << bad.witness.u << ", |v| = " << bad.witness.v;
    throw HypothesisFailure(os.str());
  }

  res.eps_sub = std::pow(spec.lam / ep.lambda1, 1.0 / s);
  res.eps_order = std::pow(res.report.alpha * std::pow(M, p - 1.0) / ep.lambda1, 1.0 / (p - 1.0));
  res.eps = std::min(res.eps_sub, res.eps_order);
  res.order_condition_binding = res.eps_order < res.eps_sub;
  res.lower = res.eps_sub;
  res.upper = M;

  const SubSolution sub = subsolution_eps(spec, ep, res.eps);
  const SubSuperPair pair = make_pair(sub.field, scaled_torsion(td, M), res.eps, M);
  if (!pair.ordered) throw HypothesisFailure("sub- and super-solution are not ordered");
  res.solve.emplace(frozen_gradient_solve(spec, pair, options));
  const double sup = res.solve->sup_u;
  res.bracket_pass = sup >= res.lower - bracket_slack && sup <= res.upper + bracket_slack;
  return res;
}

ProblemSpec example2_transformed(const ProblemSpec& spec) {
  if (spec.form != NonlinearityForm::example2) throw std::invalid_argument("needs the example-2 form");
  const double p = spec.p, q = spec.q, lam = spec.lam;
  const auto coefficient = spec.coefficient;
  const double scale = std::pow(p - 1.0, q - 1.0) / std::pow(p - 1.0, p - 1.0);
  // With u = (p-1)log(1+w): λ(1+w)^{p-1}c(x)u^{q-1}/(p-1)^{p-1}.
  Evaluator h = [=](Index node, double w, double) {
    w = std::max(w, 0.0);
    return lam * scale * std::pow(1.0 + w, p - 1.0) * (*coefficient)[node] * std::pow(std::log1p(w), q - 1.0);
  };
  return ProblemSpec::abstract(p, *spec.omega, h);
}

Example2Result example2_driver(const ProblemSpec& spec, const TorsionData& td, const EigenPair& ep,
                               const SolveOptions& options) {
  if (spec.form != NonlinearityForm::example2) throw std::invalid_argument("example2_driver needs the example-2 form");
  const double p = spec.p, q = spec.q, s = p - q;
  Example2Result res;
  res.report = base_report(spec, td, ep);
  res.thresholds = example2_thresholds(spec.c1, p, q, res.report.alpha, res.report.mu);
  res.report.lambda_star = res.thresholds.admissible;
  res.report.M_star = res.thresholds.M_box;
  res.report.admissible = spec.lam >= 0.0 && spec.lam <= res.thresholds.admissible;
  if (!res.report.admissible) {
    std::ostringstream os;
    os << "lambda = " << spec.lam << " exceeds min(printed " << res.thresholds.printed << ", box "
       << res.thresholds.box << ")";
    res.report.verdict = os.str();
    throw ThresholdViolation(os.str(), res.thresholds.admissible);
  }
  res.report.verdict = "admissible";
  const double alpha = res.report.alpha, mu = res.report.mu;

  // Direct problem: super-solution at the box maximizer.
  res.M = res.thresholds.M_box;
  res.H3_direct = check_H3(spec, td, res.M);
  if (!res.H3_direct.pass) throw HypothesisFailure("H3 fails for the direct problem at M_box");
  const ScalarField zero = ScalarField::zeros(spec.domain_ptr());
  if (spec.lam > 0.0) {
    res.eps = std::min(std::pow(spec.lam * spec.c0 / ep.lambda1, 1.0 / s),
                       std::pow(alpha * std::pow(res.M, p - 1.0) / ep.lambda1, 1.0 / (p - 1.0)));
  }
  const ScalarField sub = res.eps > 0.0 ? subsolution_eps(spec, ep, res.eps).field : zero;
  const SubSuperPair pair = make_pair(sub, scaled_torsion(td, res.M), res.eps, res.M);
  if (!pair.ordered) throw HypothesisFailure("direct sub- and super-solution are not ordered");
  res.direct.emplace(frozen_gradient_solve(spec, pair, options));

  // Transformed problem: h is increasing in w, so (H3) reduces to h(M_w) <= αM_w^{p-1}.
  const ProblemSpec ws = example2_transformed(spec);
  const double cmax = spec.coefficient->values().maxCoeff();
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 400; ++k) {
    const double M = std::exp(std::log(1e-6) + k * (std::log(1e3) - std::log(1e-6)) / 400.0);
    const double hM = spec.lam * std::pow(p - 1.0, q - p) * std::pow(1.0 + M, p - 1.0) * cmax *
                      std::pow(std::log1p(M), q - 1.0);
    const double margin = 1.0 - hM / (alpha * std::pow(M, p - 1.0));
    if (margin > best) {
      best = margin;
      res.M_w = M;
    }
  }
  res.H3_transformed = check_H3(ws, td, res.M_w);
  if (!res.H3_transformed.pass) throw HypothesisFailure("H3 fails for the transformed problem at every scanned M_w");
  ScalarField wsub = zero;
  if (spec.lam > 0.0) {
    res.H2_transformed = check_H2(ws, ep, mu, res.M_w);
    if (!res.H2_transformed.pass) throw HypothesisFailure("H2 fails for the transformed problem");
    res.eps_w = abstract_epsilon(res.H2_transformed.value, res.M_w, mu, ep);
    wsub = subsolution_eps(ws, ep, res.eps_w).field;
  }
  const SubSuperPair wpair = make_pair(wsub, scaled_torsion(td, res.M_w), res.eps_w, res.M_w);
  if (!wpair.ordered) throw HypothesisFailure("transformed sub- and super-solution are not ordered");
  res.transformed.emplace(frozen_gradient_solve(ws, wpair, options));

  Vector mapped = res.transformed->solution.values().unaryExpr([p](double w) { return (p - 1.0) * std::log1p(w); });
  res.mapped.emplace(spec.domain_ptr(), std::move(mapped), true);
  res.discrepancy = (res.direct->solution.values() - res.mapped->values()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, res.direct->sup_u);
  res.tolerance = 10.0 * (options.tol * scale + options.tol * scale);
  res.agree = res.direct->converged && res.transformed->converged && res.discrepancy <= res.tolerance;
  return res;
}

}  // namespace plap
