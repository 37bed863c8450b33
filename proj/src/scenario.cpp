#include "plap/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "plap/expr.hpp"

namespace plap {

namespace {

/// Line of the first occurrence of "key" in the document, 0 when absent.
std::size_t line_of_key(const std::string& text, const std::string& key) {
  const std::size_t at = text.find("\"" + key + "\"");
  if (at == std::string::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(at), '\n'));
}

class Reader {
 public:
  Reader(const std::string& text, const json& doc, std::string path) : text_(text), doc_(doc), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string field = path_.empty() ? key : path_ + "." + key;
    const std::size_t line = line_of_key(text_, key);
    std::ostringstream os;
    os << "field '" << field << "'";
    if (line > 0) os << " (line " << line << ")";
    os << ": " << what;
    throw ConfigError(os.str(), field, line);
  }

  bool has(const std::string& key) const { return doc_.contains(key); }

  double real(const std::string& key) const {
    const json& v = doc_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "expected a finite number");
    return x;
  }
  double real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }
  std::optional<double> maybe_real(const std::string& key) const {
    return has(key) ? std::optional<double>(real(key)) : std::nullopt;
  }

  int integer(const std::string& key, int fallback, int min_value) const {
    if (!has(key)) return fallback;
    const json& v = doc_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    const long long x = v.get<long long>();
    if (x < min_value || x > 100000000) fail(key, "expected an integer >= " + std::to_string(min_value));
    return static_cast<int>(x);
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = doc_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  Reader child(const std::string& key) const {
    const json& v = doc_.at(key);
    if (!v.is_object()) fail(key, "expected an object");
    return Reader(text_, v, path_.empty() ? key : path_ + "." + key);
  }

  void only(const std::set<std::string>& allowed) const {
    for (auto it = doc_.begin(); it != doc_.end(); ++it)
      if (!allowed.count(it.key())) fail(it.key(), "unknown field");
  }

  std::string expression(const std::string& key, const std::string& fallback) const {
    std::string src = fallback;
    if (has(key)) {
      const json& v = doc_.at(key);
      if (v.is_number())
        src = format_real(v.get<double>());
      else if (v.is_string())
        src = v.get<std::string>();
      else
        fail(key, "expected an expression string");
    }
    try {
      (void)Expression(src);
    } catch (const ExpressionError& e) {
      fail(key, e.what());
    }
    return src;
  }

 private:
  const std::string& text_;
  const json& doc_;
  std::string path_;
};

NonlinearityForm form_from_string(const Reader& r, const std::string& name) {
  if (name == "two_parameter") return NonlinearityForm::two_parameter;
  if (name == "example1") return NonlinearityForm::example1;
  if (name == "example2") return NonlinearityForm::example2;
  r.fail("form", "expected one of two_parameter, example1, example2");
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line =
        1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
    throw ConfigError("malformed JSON at line " + std::to_string(line) + ": " + e.what(), "", line);
  }
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object", "", 1);

  Scenario s;
  const Reader top(text, doc, "");
  top.only({"name", "domain", "problem", "solver", "continuation", "probe", "seed"});
  s.name = top.string("name", "");
  if (s.name.empty()) top.fail("name", "a nonempty name is required");
  if (s.name.find_first_of("/\\") != std::string::npos) top.fail("name", "must not contain path separators");
  if (!top.has("domain")) top.fail("domain", "missing");
  if (!top.has("problem")) top.fail("problem", "missing");

  const Reader dom = top.child("domain");
  dom.only({"kind", "length", "lx", "ly", "radius", "dimension", "cells"});
  try {
    s.domain.kind = domain_kind_from_string(dom.string("kind", "interval"));
  } catch (const std::exception& e) {
    dom.fail("kind", e.what());
  }
  switch (s.domain.kind) {
    case DomainKind::interval:
      s.domain.lx = dom.real("length", 1.0);
      break;
    case DomainKind::rectangle:
      s.domain.lx = dom.real("lx", 1.0);
      s.domain.ly = dom.real("ly", s.domain.lx);
      break;
    case DomainKind::radial_ball:
      s.domain.lx = dom.real("radius", 1.0);
      s.domain.dimension = dom.integer("dimension", 2, 1);
      break;
  }
  if (!(s.domain.lx > 0.0) || !(s.domain.ly > 0.0)) dom.fail("length", "domain extents must be positive");
  s.domain.cells = dom.integer("cells", s.domain.kind == DomainKind::rectangle ? 64 : 1024, 2);

  const Reader pr = top.child("problem");
  pr.only({"form", "p", "q", "a", "b", "lambda", "lambda_factor", "beta", "beta_factor", "omega", "omega1", "omega2",
           "coefficient", "c0", "c1"});
  s.form = form_from_string(pr, pr.string("form", "two_parameter"));
  s.p = pr.real("p", 2.0);
  if (!(s.p > 1.0)) pr.fail("p", "p must exceed 1");
  s.q = pr.real("q", s.p);
  if (!(s.q > 1.0) || s.q > s.p) pr.fail("q", "need 1 < q <= p");
  s.lambda = pr.maybe_real("lambda");
  s.lambda_factor = pr.maybe_real("lambda_factor");
  if (s.lambda && s.lambda_factor) pr.fail("lambda_factor", "give lambda or lambda_factor, not both");
  if (!s.lambda && !s.lambda_factor) pr.fail("lambda", "missing");
  if (s.lambda && *s.lambda < 0.0) pr.fail("lambda", "must be nonnegative");

  if (s.form == NonlinearityForm::two_parameter) {
    s.a = pr.real("a", 0.5 * (s.p - 1.0));
    s.b = pr.real("b", 0.5 * (s.p - 1.0));
    if (!(s.a > 0.0) || !(s.b > 0.0)) pr.fail("a", "exponents must be positive");
    if (s.a + s.b > s.p - 1.0 + 1e-12) pr.fail("b", "need a + b <= p - 1");
    s.beta = pr.maybe_real("beta");
    s.beta_factor = pr.maybe_real("beta_factor");
    if (s.beta && s.beta_factor) pr.fail("beta_factor", "give beta or beta_factor, not both");
    if (!s.beta && !s.beta_factor) s.beta = 0.0;
    if ((s.beta && *s.beta < 0.0) || (s.beta_factor && *s.beta_factor < 0.0)) pr.fail("beta", "must be nonnegative");
    if (s.lambda_factor) pr.fail("lambda_factor", "only the example forms define lambda_*");
    s.omega1 = pr.expression("omega1", pr.expression("omega", "1"));
    s.omega2 = pr.expression("omega2", pr.expression("omega", "1"));
  } else {
    if (!(s.q < s.p)) pr.fail("q", "the example forms need q < p");
    for (const char* key : {"a", "b", "beta", "beta_factor", "omega1", "omega2"})
      if (pr.has(key)) pr.fail(key, "not used by this form");
    if (s.form == NonlinearityForm::example1) {
      s.omega1 = s.omega2 = pr.expression("omega", "1");
      for (const char* key : {"coefficient", "c0", "c1"})
        if (pr.has(key)) pr.fail(key, "not used by example1");
    } else {
      if (pr.has("omega")) pr.fail("omega", "example2 uses the weight 1");
      s.coefficient = pr.expression("coefficient", "1");
      s.c0 = pr.real("c0", 1.0);
      s.c1 = pr.real("c1", s.c0);
      if (!(s.c0 > 0.0) || s.c1 < s.c0) pr.fail("c1", "need 0 < c0 <= c1");
    }
  }

  if (top.has("solver")) {
    const Reader sv = top.child("solver");
    sv.only({"tol", "inner_tol", "max_iterations"});
    s.tol = sv.real("tol", s.tol);
    s.inner_tol = sv.real("inner_tol", s.inner_tol);
    s.max_iterations = sv.integer("max_iterations", s.max_iterations, 1);
    if (!(s.tol > 0.0)) sv.fail("tol", "must be positive");
    if (!(s.inner_tol > 0.0)) sv.fail("inner_tol", "must be positive");
  }
  if (top.has("continuation")) {
    const Reader c = top.child("continuation");
    c.only({"q0", "stages", "bound_tol"});
    ContinuationConfig cc;
    cc.q0 = c.real("q0", 0.0);
    cc.stages = c.integer("stages", cc.stages, 1);
    cc.bound_tol = c.real("bound_tol", cc.bound_tol);
    if (cc.q0 != 0.0 && (!(cc.q0 > 1.0) || !(cc.q0 < s.p))) c.fail("q0", "need 1 < q0 < p");
    s.continuation = cc;
  }
  if (top.has("probe")) {
    const Reader c = top.child("probe");
    c.only({"lambda_ratio", "starts", "iterations"});
    ProbeConfig pc;
    pc.lambda_ratio = c.real("lambda_ratio", pc.lambda_ratio);
    pc.starts = c.integer("starts", pc.starts, 1);
    pc.iterations = c.integer("iterations", pc.iterations, 1);
    if (!(pc.lambda_ratio > 0.0)) c.fail("lambda_ratio", "must be positive");
    s.probe = pc;
  }
  if (top.has("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_unsigned()) top.fail("seed", "expected a nonnegative integer");
    s.seed = v.get<std::uint64_t>();
  }
  if ((s.continuation || s.probe) && (s.form != NonlinearityForm::two_parameter || s.q != s.p))
    top.fail(s.continuation ? "continuation" : "probe", "only meaningful for the two_parameter form with q = p");
  if (s.form == NonlinearityForm::two_parameter && s.q == s.p && std::abs(s.a + s.b - (s.p - 1.0)) > 1e-12)
    pr.fail("q", "q = p needs a + b = p - 1");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string(), "", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

DomainPtr build_domain(const DomainConfig& config, std::optional<double> h) {
  Index cells = config.cells;
  if (h) {
    if (!(*h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    const double n = config.lx / *h;
    cells = static_cast<Index>(std::llround(n));
    if (cells < 2 || std::abs(n - static_cast<double>(cells)) > 1e-9 * n)
      throw std::invalid_argument("spacing " + format_real(*h) + " does not divide the domain extent");
  }
  switch (config.kind) {
    case DomainKind::interval:
      return Domain::interval(config.lx, cells);
    case DomainKind::rectangle:
      return Domain::rectangle(config.lx, config.ly, cells);
    case DomainKind::radial_ball:
      return Domain::radial_ball(config.lx, config.dimension, cells);
  }
  throw std::invalid_argument("unknown domain kind");
}

json to_json(const TorsionData& td) {
  return {{"p", td.p},          {"sup_phi", td.sup_phi},     {"sup_grad_phi", td.sup_grad_phi},
          {"alpha", td.alpha()}, {"mu", td.mu()},             {"residual", td.residual},
          {"iterations", td.iterations}, {"converged", td.converged}};
}

json to_json(const EigenPair& ep) {
  return {{"p", ep.p},
          {"lambda1", ep.lambda1},
          {"residual", ep.residual},
          {"iterations", ep.iterations},
          {"converged", ep.converged},
          {"trace", ep.trace}};
}

json to_json(const ThresholdReport& r) {
  return {{"alpha", r.alpha},   {"mu", r.mu},       {"lambda1", r.lambda1},     {"beta_max", r.beta_max},
          {"lambda_star", r.lambda_star}, {"M_star", r.M_star}, {"lambda", r.lambda}, {"beta", r.beta},
          {"admissible", r.admissible}, {"verdict", r.verdict}};
}

json to_json(const SolveReport& r) {
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back({{"sup_u", t.sup_u}, {"step", t.step}, {"residual", t.residual}, {"floor", t.floor}});
  return {{"iterations", r.iterations},
          {"residual", r.residual},
          {"residual_tol", r.residual_tol},
          {"sup_u", r.sup_u},
          {"converged", r.converged},
          {"sandwich_pass", r.sandwich_pass},
          {"lower_margin", r.lower_margin},
          {"upper_margin", r.upper_margin},
          {"escaped", r.escaped},
          {"monotone", r.monotone},
          {"message", r.message},
          {"trace", trace}};
}

json to_json(const ContinuationTrace& t) {
  json stages = json::array();
  for (const auto& s : t.stages)
    stages.push_back({{"q", s.q},
                      {"lambda_internal", s.lambda_internal},
                      {"log_sup_v", s.log_sup_v},
                      {"sup_v", s.sup_v},
                      {"lambda_q", s.lambda_q},
                      {"sup_grad", s.sup_grad},
                      {"in_bounds", s.in_bounds},
                      {"iterations", s.iterations},
                      {"residual", s.residual},
                      {"sandwich_pass", s.sandwich_pass}});
  return {{"stages", stages},
          {"alpha", t.alpha},
          {"lambda1", t.lambda1},
          {"lower", t.lower},
          {"lambda_beta", t.lambda_beta},
          {"lambda_beta_error", t.lambda_beta_error},
          {"complete", t.complete},
          {"bounds_hold", t.bounds_hold},
          {"strict_gap", t.strict_gap},
          {"gradient_bounded", t.gradient_bounded},
          {"message", t.message}};
}

json to_json(const ProbeReport& r) {
  json starts = json::array();
  for (const auto& s : r.starts)
    starts.push_back({{"sup_norms", s.sup_norms},
                      {"growth", s.growth},
                      {"final_growth", s.final_growth},
                      {"verdict", to_string(s.verdict)}});
  return {{"ratio", r.ratio},
          {"predicted", r.predicted},
          {"seed", r.seed},
          {"starts", starts},
          {"verdict", to_string(r.verdict)}};
}

void write_trace_csv(const ContinuationTrace& trace, std::ostream& out) {
  out << "n,q,lambda_internal,log_sup_v,sup_v,lambda_q,sup_grad,in_bounds\n";
  for (std::size_t n = 0; n < trace.stages.size(); ++n) {
    const auto& s = trace.stages[n];
    out << n << ',' << format_real(s.q) << ',' << format_real(s.lambda_internal) << ',' << format_real(s.log_sup_v)
        << ',' << format_real(s.sup_v) << ',' << format_real(s.lambda_q) << ',' << format_real(s.sup_grad) << ','
        << (s.in_bounds ? 1 : 0) << '\n';
  }
}

void write_iterations_csv(const SolveReport& report, std::ostream& out) {
  out << "iteration,sup_u,step,residual,floor\n";
  for (std::size_t k = 0; k < report.trace.size(); ++k) {
    const auto& t = report.trace[k];
    out << k + 1 << ',' << format_real(t.sup_u) << ',' << format_real(t.step) << ',' << format_real(t.residual)
        << ',' << format_real(t.floor) << '\n';
  }
}

namespace {

/// Everything a pipeline needs once the scenario is parsed.
struct Setup {
  DomainPtr domain;
  std::shared_ptr<const Weight> omega1, omega2;
  ProblemSpec spec;
  TorsionData td;
  EigenPair ep;
  SolverOptions inner;
  SolveOptions solve;
};

Weight weight_from(const DomainPtr& domain, const std::string& src, const std::string& field) {
  try {
    return Weight(sample_expression(domain, Expression(src), false));
  } catch (const std::exception& e) {
    throw ConfigError("field 'problem." + field + "': " + e.what(), "problem." + field);
  }
}

class ArtifactWriter {
 public:
  ArtifactWriter(const std::filesystem::path& root, const std::string& name) {
    if (root.empty()) return;
    dir_ = root / name;
    std::filesystem::create_directories(dir_);
  }

  template <class Fn>
  void write(const std::string& file, Fn&& fn) const {
    if (dir_.empty()) return;
    std::ofstream out(dir_ / file);
    fn(out);
  }

  void field(const std::string& file, const ScalarField& f) const {
    write(file, [&](std::ostream& out) { write_field_csv(f, out); });
  }

 private:
  std::filesystem::path dir_;
};

Setup prepare(const Scenario& sc, const RunOptions& options, json& report) {
  DomainPtr domain;
  try {
    domain = build_domain(sc.domain, options.h);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("field 'domain': ") + e.what(), "domain");
  }
  report["domain"] = domain_to_json(*domain);
  auto omega1 = std::make_shared<const Weight>(weight_from(domain, sc.omega1, "omega1"));
  auto omega2 = std::make_shared<const Weight>(weight_from(domain, sc.omega2, "omega2"));

  SolverOptions inner;
  inner.tol = sc.inner_tol;
  SolveOptions solve;
  solve.tol = options.tol.value_or(sc.tol);
  solve.max_iterations = sc.max_iterations;
  solve.inner = inner;

  const double lam0 = sc.lambda.value_or(1.0);
  ProblemSpec spec;
  switch (sc.form) {
    case NonlinearityForm::two_parameter:
      spec = ProblemSpec::two_parameter(sc.p, sc.q, sc.a, sc.b, lam0, sc.beta.value_or(0.0), *omega1, *omega2);
      break;
    case NonlinearityForm::example1:
      spec = ProblemSpec::example1(sc.p, sc.q, lam0, *omega1);
      break;
    case NonlinearityForm::example2: {
      try {
        const ScalarField c = sample_expression(domain, Expression(sc.coefficient), false);
        spec = ProblemSpec::example2(sc.p, sc.q, lam0, c, sc.c0, sc.c1);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field 'problem.coefficient': ") + e.what(), "problem.coefficient");
      }
      break;
    }
    case NonlinearityForm::abstract:
      throw ConfigError("abstract problems have no scenario form", "problem.form");
  }

  TorsionData td = solve_torsion(*spec.omega, sc.p, inner);
  report["torsion"] = to_json(td);
  EigenOptions eo;
  eo.inner.tol = std::min(1e-12, sc.inner_tol);
  // The sub-solution εu₁ is compared against the λω₁ term.
  EigenPair ep = principal_eigenpair(*spec.omega1, sc.p, eo);
  report["eigenpair"] = to_json(ep);
  if (!td.converged) throw std::runtime_error("torsion solve did not converge");
  if (!ep.converged) throw std::runtime_error("eigenpair iteration did not converge");

  const GapReport gap = check_alpha_lt_lambda1(td, ep);
  report["gap"] = {{"alpha", gap.alpha}, {"lambda1", gap.lambda1}, {"gap", gap.gap}, {"holds", gap.holds}};
  if (!gap.holds) throw HypothesisFailure("alpha exceeds lambda1");

  const double alpha = td.alpha(), mu = td.mu();
  if (sc.form == NonlinearityForm::two_parameter && sc.beta_factor)
    spec.beta = *sc.beta_factor * alpha / std::pow(mu, sc.b);
  if (sc.lambda_factor) {
    if (sc.form == NonlinearityForm::example1)
      spec.lam = *sc.lambda_factor * example1_thresholds(sc.p, sc.q, alpha, mu).lambda_star;
    else
      spec.lam = *sc.lambda_factor * example2_thresholds(sc.c1, sc.p, sc.q, alpha, mu).admissible;
  }
  return Setup{domain, omega1, omega2, std::move(spec), std::move(td), std::move(ep), inner, solve};
}

ThresholdReport two_parameter_thresholds(const Setup& st) {
  ThresholdReport r;
  r.alpha = st.td.alpha();
  r.mu = st.td.mu();
  r.lambda1 = st.ep.lambda1;
  r.beta_max = r.alpha / std::pow(r.mu, st.spec.b);
  r.lambda = st.spec.lam;
  r.beta = st.spec.beta;
  const bool homogeneous_sum = std::abs(st.spec.a + st.spec.b - (st.spec.p - 1.0)) <= 1e-12;
  if (homogeneous_sum) {
    r.admissible = r.beta < r.beta_max && r.lambda > 0.0;
    r.verdict = r.admissible ? "admissible" : "beta >= alpha/mu^b or lambda <= 0";
  } else {
    r.admissible = r.lambda > 0.0;
    r.verdict = r.admissible ? "admissible (a + b < p - 1: every beta >= 0)" : "lambda <= 0";
  }
  return r;
}

int run_two_parameter(const Scenario& sc, Setup& st, const RunOptions& options, const ArtifactWriter& out,
                      json& report, std::string& message) {
  const ThresholdReport thr = two_parameter_thresholds(st);
  report["thresholds"] = to_json(thr);
  if (!thr.admissible) {
    message = thr.verdict;
    return exit_hypothesis;
  }
  const double p = sc.p;

  if (sc.q == p) {
    ContinuationOptions co;
    const ContinuationConfig cc = sc.continuation.value_or(ContinuationConfig{});
    co.stages = cc.stages;
    co.bound_tol = cc.bound_tol;
    co.solve = st.solve;
    const double q0 = cc.q0 > 0.0 ? cc.q0 : p - 0.5 * (p - 1.0);
    const ProblemSpec base = st.spec.with_q(q0);
    const ContinuationTrace trace = continuation_q_to_p(base, st.td, st.ep, co);
    report["continuation"] = to_json(trace);
    out.write("continuation.csv", [&](std::ostream& o) { write_trace_csv(trace, o); });
    if (trace.u_beta) {
      out.field("u_beta.csv", *trace.u_beta);
      const ProblemSpec at_limit = st.spec.with_lambda(trace.lambda_beta);
      json hom = json::array();
      for (double k : {0.5, 2.0, 10.0}) {
        const HomogeneityReport h = homogeneity_check(*trace.u_beta, at_limit, k);
        hom.push_back({{"k", h.k},
                       {"residual_u", h.residual_u},
                       {"residual_ku", h.residual_ku},
                       {"difference", h.difference}});
      }
      report["homogeneity"] = hom;
    }
    if (sc.probe) {
      ProbeOptions po;
      po.starts = sc.probe->starts;
      po.iterations = sc.probe->iterations;
      po.seed = options.seed.value_or(sc.seed);
      const ProblemSpec probe_spec = st.spec.with_lambda(sc.probe->lambda_ratio * st.ep.lambda1);
      report["probe"] = to_json(nonexistence_probe(probe_spec, st.ep, po));
    }
    if (!trace.complete) {
      message = trace.message;
      return exit_solver;
    }
    if (!trace.bounds_hold) {
      message = "a continuation stage left [alpha - beta mu^b, lambda1]";
      return exit_solver;
    }
    message = trace.strict_gap ? "continuation complete" : "continuation complete; lambda_beta not below lambda1";
    return exit_ok;
  }

  const bool homogeneous_sum = std::abs(sc.a + sc.b - (p - 1.0)) <= 1e-12;
  double M = 0.0;
  if (homogeneous_sum) {
    M = supersolution_two_param(st.spec, st.td).M;
  } else {
    M = solve_M_root(st.spec, st.td);
    report["M_root_defect"] = M_root_defect(st.spec, st.td, M);
  }
  const SubSolution sub = subsolution_eps(st.spec, st.ep);
  const SubSuperPair pair = make_pair(sub.field, scaled_torsion(st.td, M), sub.eps, M);
  report["pair"] = {{"eps", pair.eps},
                    {"M", pair.M},
                    {"ordered", pair.ordered},
                    {"margin", pair.margin},
                    {"sub_defect", sub.defect},
                    {"sub_tolerance", sub.tolerance}};
  if (st.spec.lam > 0.0 && sc.q < p)
    report["pair"]["ordering_inequality"] =
        ordering_inequality(st.td.alpha(), st.ep.lambda1, st.spec.lam, p, sc.q);
  if (!pair.ordered) {
    message = "sub- and super-solution are not ordered";
    return exit_hypothesis;
  }
  out.field("sub.csv", pair.sub);
  out.field("super.csv", pair.super);
  const SolveReport rep = frozen_gradient_solve(st.spec, pair, st.solve);
  report["solve"] = to_json(rep);
  out.field("solution.csv", rep.solution);
  out.write("iterations.csv", [&](std::ostream& o) { write_iterations_csv(rep, o); });
  if (!rep.converged) {
    message = rep.message;
    return exit_solver;
  }
  if (!rep.sandwich_pass) {
    message = "solution leaves the order interval";
    return exit_solver;
  }
  message = "solution sandwiched";
  return exit_ok;
}

int run_example1(Setup& st, const ArtifactWriter& out, json& report, std::string& message) {
  ThresholdReport thr;
  try {
    const Example1Result res = example1_driver(st.spec, st.td, st.ep, st.solve);
    report["thresholds"] = to_json(res.report);
    report["example1"] = {{"M_star", res.thresholds.M_star},
                          {"H_min", res.thresholds.H_min},
                          {"lambda_star", res.thresholds.lambda_star},
                          {"cross_check", res.thresholds.cross_check},
                          {"golden_M", res.thresholds.golden_M},
                          {"minimizer_confirmed", res.thresholds.minimizer_confirmed},
                          {"eps_sub", res.eps_sub},
                          {"eps_order", res.eps_order},
                          {"eps", res.eps},
                          {"order_condition_binding", res.order_condition_binding},
                          {"lower", res.lower},
                          {"upper", res.upper},
                          {"bracket_pass", res.bracket_pass}};
    report["hypotheses"] = {to_json(res.H1), to_json(res.H2), to_json(res.H3)};
    report["solve"] = to_json(*res.solve);
    out.field("solution.csv", res.solve->solution);
    out.write("iterations.csv", [&](std::ostream& o) { write_iterations_csv(*res.solve, o); });
    if (!res.solve->converged) {
      message = res.solve->message;
      return exit_solver;
    }
    if (!res.bracket_pass || !res.solve->sandwich_pass) {
      message = "sup-norm bracket or sandwich check failed";
      return exit_solver;
    }
    message = "solution within the example-1 bracket";
    return exit_ok;
  } catch (const ThresholdViolation& e) {
    const Example1Thresholds t = example1_thresholds(st.spec.p, st.spec.q, st.td.alpha(), st.td.mu());
    thr.alpha = st.td.alpha();
    thr.mu = st.td.mu();
    thr.lambda1 = st.ep.lambda1;
    thr.beta_max = thr.alpha / std::pow(thr.mu, st.spec.b);
    thr.lambda_star = t.lambda_star;
    thr.M_star = t.M_star;
    thr.lambda = st.spec.lam;
    thr.admissible = false;
    thr.verdict = e.what();
    report["thresholds"] = to_json(thr);
    throw;
  }
}

int run_example2(Setup& st, const ArtifactWriter& out, json& report, std::string& message) {
  const Example2Thresholds t = example2_thresholds(st.spec.c1, st.spec.p, st.spec.q, st.td.alpha(), st.td.mu());
  report["example2_thresholds"] = {
      {"printed", t.printed}, {"box", t.box}, {"M_box", t.M_box}, {"admissible", t.admissible}};
  const Example2Result res = example2_driver(st.spec, st.td, st.ep, st.solve);
  report["thresholds"] = to_json(res.report);
  report["example2"] = {{"M", res.M},
                        {"M_w", res.M_w},
                        {"eps", res.eps},
                        {"eps_w", res.eps_w},
                        {"discrepancy", res.discrepancy},
                        {"tolerance", res.tolerance},
                        {"agree", res.agree}};
  report["hypotheses"] = {to_json(res.H3_direct), to_json(res.H2_transformed), to_json(res.H3_transformed)};
  report["solve"] = to_json(*res.direct);
  report["transformed"] = to_json(*res.transformed);
  out.field("solution.csv", res.direct->solution);
  out.field("solution_w.csv", res.transformed->solution);
  out.field("solution_mapped.csv", *res.mapped);
  if (!res.direct->converged || !res.transformed->converged) {
    message = !res.direct->converged ? res.direct->message : res.transformed->message;
    return exit_solver;
  }
  if (!res.agree) {
    message = "direct and transformed solutions disagree by " + format_real(res.discrepancy);
    return exit_solver;
  }
  message = "direct and transformed solutions agree";
  return exit_ok;
}

RunResult finish(RunResult r, const ArtifactWriter& out) {
  r.report["exit_code"] = r.exit_code;
  r.report["message"] = r.message;
  out.write("report.json", [&](std::ostream& o) { o << dump_json(r.report) << '\n'; });
  return r;
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const RunOptions& options) {
  RunResult r;
  r.name = sc.name;
  r.report["scenario"] = sc.name;
  r.report["form"] = to_string(sc.form);
  r.report["parameters"] = {{"p", sc.p}, {"q", sc.q}, {"a", sc.a}, {"b", sc.b}};
  std::unique_ptr<ArtifactWriter> out;
  try {
    out = std::make_unique<ArtifactWriter>(options.out, sc.name);
  } catch (const std::exception& e) {
    r.exit_code = exit_config;
    r.message = std::string("cannot create output directory: ") + e.what();
    return r;
  }
  try {
    Setup st = prepare(sc, options, r.report);
    r.report["parameters"]["lambda"] = st.spec.lam;
    r.report["parameters"]["beta"] = st.spec.beta;
    switch (sc.form) {
      case NonlinearityForm::two_parameter:
        r.exit_code = run_two_parameter(sc, st, options, *out, r.report, r.message);
        break;
      case NonlinearityForm::example1:
        r.exit_code = run_example1(st, *out, r.report, r.message);
        break;
      case NonlinearityForm::example2:
        r.exit_code = run_example2(st, *out, r.report, r.message);
        break;
      case NonlinearityForm::abstract:
        break;
    }
  } catch (const ConfigError& e) {
    r.exit_code = exit_config;
    r.message = e.what();
  } catch (const ThresholdViolation& e) {
    r.exit_code = exit_hypothesis;
    r.message = e.what();
    r.report["threshold_bound"] = e.bound();
  } catch (const HypothesisFailure& e) {
    r.exit_code = exit_hypothesis;
    r.message = e.what();
  } catch (const std::invalid_argument& e) {
    r.exit_code = exit_config;
    r.message = e.what();
  } catch (const std::exception& e) {
    r.exit_code = exit_solver;
    r.message = e.what();
  }
  return finish(std::move(r), *out);
}

RunResult run_scenario_file(const std::filesystem::path& path, const RunOptions& options) {
  try {
    return run_scenario(load_scenario(path), options);
  } catch (const ConfigError& e) {
    RunResult r;
    r.exit_code = exit_config;
    r.name = path.stem().string();
    r.message = path.string() + ": " + e.what();
    r.report["message"] = r.message;
    r.report["exit_code"] = r.exit_code;
    return r;
  }
}

RunResult scenario_thresholds(const Scenario& sc, const RunOptions& options) {
  RunResult r;
  r.name = sc.name;
  r.report["scenario"] = sc.name;
  try {
    Setup st = prepare(sc, options, r.report);
    ThresholdReport thr;
    switch (sc.form) {
      case NonlinearityForm::two_parameter:
        thr = two_parameter_thresholds(st);
        break;
      case NonlinearityForm::example1: {
        thr = two_parameter_thresholds(st);
        const Example1Thresholds t = example1_thresholds(sc.p, sc.q, thr.alpha, thr.mu);
        thr.lambda_star = t.lambda_star;
        thr.M_star = t.M_star;
        thr.admissible = thr.lambda > 0.0 && thr.lambda <= t.lambda_star;
        thr.verdict = thr.admissible ? "admissible" : "lambda outside (0, lambda_*]";
        r.report["example1"] = {{"H_min", t.H_min},
                                {"cross_check", t.cross_check},
                                {"golden_M", t.golden_M},
                                {"minimizer_confirmed", t.minimizer_confirmed}};
        break;
      }
      case NonlinearityForm::example2: {
        thr = two_parameter_thresholds(st);
        const Example2Thresholds t = example2_thresholds(sc.c1, sc.p, sc.q, thr.alpha, thr.mu);
        thr.lambda_star = t.admissible;
        thr.M_star = t.M_box;
        thr.admissible = thr.lambda >= 0.0 && thr.lambda <= t.admissible;
        thr.verdict = thr.admissible ? "admissible" : "lambda above min(printed, box)";
        r.report["example2"] = {{"printed", t.printed}, {"box", t.box}, {"M_box", t.M_box}};
        break;
      }
      case NonlinearityForm::abstract:
        break;
    }
    thr.beta = st.spec.beta;
    r.report["thresholds"] = to_json(thr);
    r.exit_code = thr.admissible ? exit_ok : exit_hypothesis;
    r.message = thr.verdict;
  } catch (const ConfigError& e) {
    r.exit_code = exit_config;
    r.message = e.what();
  } catch (const HypothesisFailure& e) {
    r.exit_code = exit_hypothesis;
    r.message = e.what();
  } catch (const std::invalid_argument& e) {
    r.exit_code = exit_config;
    r.message = e.what();
  } catch (const std::exception& e) {
    r.exit_code = exit_solver;
    r.message = e.what();
  }
  r.report["exit_code"] = r.exit_code;
  r.report["message"] = r.message;
  return r;
}

}  // namespace plap
