#include "plap/subsuper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace plap {

SubSuperPair make_pair(ScalarField sub, ScalarField super, double eps, double M) {
  const OrderingReport order = compare_fields(sub, super);
  SubSuperPair pair{std::move(sub), std::move(super), eps, M};
  pair.ordered = order.ordered;
  pair.margin = order.min_gap;
  return pair;
}

ScalarField scaled_torsion(const TorsionData& td, double M) { return td.phi.scaled(M / td.sup_phi); }

SuperSolution supersolution_two_param(const ProblemSpec& spec, const TorsionData& td) {
  if (spec.form != NonlinearityForm::two_parameter)
    throw std::invalid_argument("supersolution_two_param needs the two-parameter form");
  if (!(spec.q > 1.0) || !(spec.q < spec.p)) throw std::invalid_argument("super-solution needs 1 < q < p");
  if (std::abs(spec.a + spec.b - (spec.p - 1.0)) > 1e-12)
    throw std::invalid_argument("super-solution needs a + b = p - 1");
  const double alpha = td.alpha();
  const double mu = td.mu();
  const double mub = std::pow(mu, spec.b);
  const double beta_max = alpha / mub;
  if (spec.beta >= beta_max) {
    std::ostringstream os;
    os << "beta = " << spec.beta << " violates beta < alpha/mu^b = " << beta_max;
    throw ThresholdViolation(os.str(), beta_max);
  }
  const double denom = alpha - spec.beta * mub;
  const double M = std::pow(spec.lam / denom, 1.0 / (spec.p - spec.q));
  if (!(M <= 1e12)) throw std::overflow_error("super-solution amplitude M exceeds 1e12");

  const double lhs = alpha * std::pow(M, spec.p - 1.0);
  const double rhs = spec.lam * std::pow(M, spec.q - 1.0) + spec.beta * mub * std::pow(M, spec.a + spec.b);
  SuperSolution out{scaled_torsion(td, M), M};
  out.identity_error = std::abs(lhs - rhs) / std::max(lhs, std::numeric_limits<double>::min());
  if (out.identity_error > 1e-12)
    throw std::runtime_error("super-solution identity defect exceeds 1e-12");
  return out;
}

double M_root_defect(const ProblemSpec& spec, const TorsionData& td, double M) {
  const double mub = std::pow(td.mu(), spec.b);
  return td.alpha() * std::pow(M, spec.p - 1.0) - spec.lam * std::pow(M, spec.q - 1.0) -
         spec.beta * mub * std::pow(M, spec.a + spec.b);
}

double solve_M_root(const ProblemSpec& spec, const TorsionData& td) {
  const double p = spec.p, q = spec.q;
  if (!(q > 1.0) || !(q < p)) throw std::invalid_argument("M root needs 1 < q < p");
  if (!(spec.a + spec.b < p - 1.0)) throw std::invalid_argument("M root needs a + b < p - 1");
  if (!(spec.lam > 0.0) || spec.beta < 0.0) throw std::invalid_argument("M root needs lambda > 0, beta >= 0");
  const double alpha = td.alpha();
  if (spec.beta == 0.0) return std::pow(spec.lam / alpha, 1.0 / (p - q));

  const double mub = std::pow(td.mu(), spec.b);
  // Same sign as g(M), without overflow: g(M) / M^{p-1}.
  const auto scaled = [&](double t) {
    return alpha - spec.lam * std::exp((q - p) * t) - spec.beta * mub * std::exp((spec.a + spec.b + 1.0 - p) * t);
  };
  double lo = std::log(1e-12), hi = std::log(1e12);
  while (scaled(lo) > 0.0 && lo > -690.0) lo *= 2.0;
  while (scaled(hi) < 0.0 && hi < 690.0) hi *= 2.0;
  if (!(scaled(lo) <= 0.0) || !(scaled(hi) >= 0.0)) {
    std::ostringstream os;
    os << "no sign change of the M equation: g(e^" << lo << ")/M^{p-1} = " << scaled(lo) << ", g(e^" << hi
       << ")/M^{p-1} = " << scaled(hi);
    throw std::runtime_error(os.str());
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (scaled(mid) < 0.0 ? lo : hi) = mid;
  }
  const double M_lo = std::exp(lo), M_hi = std::exp(hi);
  const double M = std::abs(M_root_defect(spec, td, M_lo)) < std::abs(M_root_defect(spec, td, M_hi)) ? M_lo : M_hi;

  const double top = alpha * std::pow(M, p - 1.0);
  if (std::abs(M_root_defect(spec, td, M)) > 1e-12 * std::max(top, 1.0))
    throw std::runtime_error("M root residual above 1e-12 relative");
  if (top < spec.lam * std::pow(M, q - 1.0) * (1.0 - 1e-12))
    throw std::runtime_error("M root violates alpha M^{p-1} >= lambda M^{q-1}");
  return M;
}

SubSolution subsolution_eps(const ProblemSpec& spec, const EigenPair& ep, double eps) {
  const double p = spec.p;
  if (!(eps > 0.0)) {
    const bool sublinear = spec.form != NonlinearityForm::abstract && spec.q < p;
    if (!sublinear) throw std::invalid_argument("subsolution_eps needs an explicit epsilon for this problem");
    const double lam = spec.form == NonlinearityForm::example2 ? spec.lam * spec.c0 : spec.lam;
    eps = std::pow(lam / ep.lambda1, 1.0 / (p - spec.q));
  }
  SubSolution out{ep.u1.scaled(eps), eps};
  const Vector rhs = spec.evaluate(out.field);
  const Vector r = nodal_residual(out.field, rhs, p);

  // The discrete eigenfunction carries its own residual into εu₁.
  const double scale = std::pow(eps, p - 1.0);
  out.tolerance = scale * (2.0 * ep.residual + 64.0 * std::numeric_limits<double>::epsilon() * ep.lambda1 *
                                                    spec.domain().mass().maxCoeff());
  Index worst = 0;
  out.defect = -std::numeric_limits<double>::infinity();
  for (Index i : spec.domain().interior()) {
    if (r[i] > out.defect) {
      out.defect = r[i];
      worst = i;
    }
  }
  if (out.defect > out.tolerance) {
    std::ostringstream os;
    os << "eps*u1 (eps = " << eps << ") violates the sub-solution inequality at node " << worst << " by "
       << out.defect << " (tolerance " << out.tolerance << ")";
    throw HypothesisFailure(os.str());
  }
  return out;
}

nlohmann::json to_json(const HypothesisReport& report) {
  nlohmann::json j;
  j["hypothesis"] = report.hypothesis;
  j["pass"] = report.pass;
  j["margin"] = report.margin;
  j["value"] = report.value;
  j["witness"] = {{"node", report.witness.node}, {"u", report.witness.u}, {"v", report.witness.v}};
  j["resolution"] = {{"u_points", report.resolution.u_points},
                     {"v_points", report.resolution.v_points},
                     {"node_stride", report.resolution.node_stride},
                     {"levels", report.resolution.levels}};
  if (!report.levels.empty()) j["levels"] = report.levels;
  return j;
}

namespace {

std::vector<double> uniform(double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(std::max(n, 2)));
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = hi * static_cast<double>(k) / static_cast<double>(out.size() - 1);
  return out;
}

}  // namespace

HypothesisReport check_H1(const ProblemSpec& spec, double Mcap, const Sampling& sampling) {
  HypothesisReport rep;
  rep.hypothesis = "H1";
  rep.resolution = sampling;
  const auto us = uniform(Mcap, sampling.u_points);
  const Index n = spec.domain().size();
  double vmax = sampling.v_start;
  double C = 0.0;
  for (int level = 0; level < std::max(sampling.levels, 2); ++level, vmax *= 2.0) {
    for (double v : uniform(vmax, sampling.v_points)) {
      const double denom = 1.0 + std::pow(v, spec.p);
      for (Index x = 0; x < n; x += sampling.node_stride) {
        for (double u : us) {
          const double c = spec.f(x, u, v) / denom;
          if (c > C) {
            C = c;
            rep.witness = {x, u, v};
          }
        }
      }
    }
    rep.levels.push_back(C);
  }
  const double last = rep.levels.back();
  const double previous = rep.levels[rep.levels.size() - 2];
  rep.value = C;
  rep.pass = std::isfinite(C) && last <= previous * (1.0 + 1e-9) + 1e-300;
  rep.margin = previous > 0.0 ? previous / last - 1.0 : 0.0;
  return rep;
}

HypothesisReport check_H2(const ProblemSpec& spec, const EigenPair& ep, double mu, double Mcap,
                          const Sampling& sampling) {
  HypothesisReport rep;
  rep.hypothesis = "H2";
  rep.resolution = sampling;
  const auto vs = uniform(mu * Mcap, sampling.v_points);
  const Index n = spec.domain().size();
  const Vector& omega = ep.weight->values();
  const double p = spec.p;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 40; ++k) {
    const double eps0 = std::ldexp(1.0, -k);
    bool ok = true;
    double trial_margin = std::numeric_limits<double>::infinity();
    Witness trial_witness;
    for (int j = 0; j < sampling.u_points && ok; ++j) {
      const double u = eps0 * std::exp2(-0.25 * j);
      for (Index x = 0; x < n && ok; x += sampling.node_stride) {
        const double floor = ep.lambda1 * omega[x] * std::pow(u, p - 1.0);
        for (double v : vs) {
          const double fx = spec.f(x, u, v);
          const double m = floor > 0.0 ? fx / floor - 1.0 : (fx >= 0.0 ? 0.0 : -1.0);
          if (m < trial_margin) {
            trial_margin = m;
            trial_witness = {x, u, v};
          }
          if (m < -1e-12) {
            ok = false;
            break;
          }
        }
      }
    }
    if (trial_margin < worst_margin) {
      worst_margin = trial_margin;
      rep.witness = trial_witness;
    }
    if (ok) {
      rep.pass = true;
      rep.value = eps0;
      rep.margin = trial_margin;
      rep.witness = trial_witness;
      return rep;
    }
  }
  rep.value = 0.0;
  rep.margin = worst_margin;
  return rep;
}

HypothesisReport check_H3(const ProblemSpec& spec, const TorsionData& td, double Mcap, const Sampling& sampling) {
  HypothesisReport rep;
  rep.hypothesis = "H3";
  rep.resolution = sampling;
  rep.value = Mcap;
  const double p = spec.p;
  const double alpha = td.alpha();
  const auto us = uniform(Mcap, sampling.u_points);
  const auto vs = uniform(td.mu() * Mcap, sampling.v_points);
  const Vector& omega = spec.omega->values();
  const double cap = alpha * std::pow(Mcap, p - 1.0);
  const double norm = cap * omega.maxCoeff();
  const Index n = spec.domain().size();
  double margin = std::numeric_limits<double>::infinity();
  for (Index x = 0; x < n; x += sampling.node_stride) {
    const double top = cap * omega[x];
    for (double u : us) {
      for (double v : vs) {
        const double fx = spec.f(x, u, v);
        const double m = std::min(fx, top - fx) / norm;
        if (m < margin) {
          margin = m;
          rep.witness = {x, u, v};
        }
      }
    }
  }
  rep.margin = margin;
  rep.pass = margin >= -1e-12;
  return rep;
}

double abstract_epsilon(double eps0, double Mcap, double mu, const EigenPair& ep) {
  const double grad = sup_norm(grad_magnitude(ep.u1));
  return 0.5 * std::min({eps0, Mcap, mu * Mcap / grad});
}

}  // namespace plap
