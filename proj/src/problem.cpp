#include "plap/problem.hpp"

#include <cmath>

namespace plap {

std::string to_string(NonlinearityForm form) {
  switch (form) {
    case NonlinearityForm::two_parameter:
      return "two_parameter";
    case NonlinearityForm::abstract:
      return "abstract";
    case NonlinearityForm::example1:
      return "example1";
    case NonlinearityForm::example2:
      return "example2";
  }
  return "unknown";
}

ProblemSpec ProblemSpec::two_parameter(double p, double q, double a, double b, double lam, double beta,
                                       const Weight& omega1, const Weight& omega2) {
  ProblemSpec s;
  s.p = p;
  s.q = q;
  s.a = a;
  s.b = b;
  s.lam = lam;
  s.beta = beta;
  s.omega1 = std::make_shared<const Weight>(omega1);
  s.omega2 = std::make_shared<const Weight>(omega2);
  s.omega = std::make_shared<const Weight>(Weight::max(omega1, omega2));
  s.form = NonlinearityForm::two_parameter;
  s.validate();
  return s;
}

ProblemSpec ProblemSpec::example1(double p, double q, double lam, const Weight& omega) {
  ProblemSpec s;
  s.p = p;
  s.q = q;
  s.lam = lam;
  s.omega1 = s.omega2 = s.omega = std::make_shared<const Weight>(omega);
  s.form = NonlinearityForm::example1;
  s.validate();
  return s;
}

ProblemSpec ProblemSpec::example2(double p, double q, double lam, const ScalarField& coefficient, double c0,
                                  double c1) {
  ProblemSpec s;
  s.p = p;
  s.q = q;
  s.lam = lam;
  s.omega1 = s.omega2 = s.omega = std::make_shared<const Weight>(Weight::constant(coefficient.domain_ptr(), 1.0));
  s.coefficient = std::make_shared<const ScalarField>(coefficient);
  s.c0 = c0;
  s.c1 = c1;
  s.form = NonlinearityForm::example2;
  s.validate();
  return s;
}

ProblemSpec ProblemSpec::abstract(double p, const Weight& omega, Evaluator f) {
  ProblemSpec s;
  s.p = p;
  s.q = p;
  s.omega1 = s.omega2 = s.omega = std::make_shared<const Weight>(omega);
  s.form = NonlinearityForm::abstract;
  s.custom = std::move(f);
  s.validate();
  return s;
}

void ProblemSpec::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (!omega || !omega1 || !omega2) throw std::invalid_argument("problem weights are missing");
  switch (form) {
    case NonlinearityForm::two_parameter:
      if (!(q > 1.0) || q > p) throw std::invalid_argument("two-parameter problem needs 1 < q <= p");
      if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("exponents a and b must be positive");
      if (a + b > p - 1.0 + 1e-12) throw std::invalid_argument("exponents need a + b <= p - 1");
      if (lam < 0.0 || beta < 0.0) throw std::invalid_argument("lambda and beta must be nonnegative");
      break;
    case NonlinearityForm::example1:
    case NonlinearityForm::example2:
      if (!(q > 1.0) || !(q < p)) throw std::invalid_argument("example problems need 1 < q < p");
      if (lam < 0.0) throw std::invalid_argument("lambda must be nonnegative");
      break;
    case NonlinearityForm::abstract:
      if (!custom) throw std::invalid_argument("abstract problem without an evaluator");
      break;
  }
  if (form == NonlinearityForm::example2) {
    if (!coefficient) throw std::invalid_argument("example-2 problem without a coefficient");
    if (!(c0 > 0.0) || c1 < c0) throw std::invalid_argument("example-2 envelope needs 0 < c0 <= c1");
    const Vector& c = coefficient->values();
    if (c.minCoeff() < c0 * (1.0 - 1e-12) || c.maxCoeff() > c1 * (1.0 + 1e-12))
      throw std::invalid_argument("example-2 coefficient leaves the envelope [c0, c1]");
  }
}

double ProblemSpec::f(Index node, double u, double v) const {
  u = std::max(u, 0.0);
  v = std::abs(v);
  switch (form) {
    case NonlinearityForm::two_parameter: {
      double value = lam * omega1->values()[node] * std::pow(u, q - 1.0);
      if (beta != 0.0) value += beta * omega2->values()[node] * std::pow(u, a) * std::pow(v, b);
      return value;
    }
    case NonlinearityForm::example1:
      return lam * omega->values()[node] * std::pow(u, q - 1.0) * (1.0 + std::pow(v, p));
    case NonlinearityForm::example2:
      return lam * (*coefficient)[node] * std::pow(u, q - 1.0) + std::pow(v, p);
    case NonlinearityForm::abstract:
      return custom(node, u, v);
  }
  return 0.0;
}

Evaluator ProblemSpec::evaluator() const {
  return [self = *this](Index node, double u, double v) { return self.f(node, u, v); };
}

Vector ProblemSpec::evaluate(const ScalarField& u) const {
  const ScalarField g = grad_magnitude(u);
  Vector out(u.size());
  for (Index i = 0; i < u.size(); ++i) out[i] = f(i, u[i], g[i]);
  return out;
}

ProblemSpec ProblemSpec::with_lambda(double value) const {
  ProblemSpec s = *this;
  s.lam = value;
  return s;
}

ProblemSpec ProblemSpec::with_q(double value) const {
  ProblemSpec s = *this;
  s.q = value;
  s.validate();
  return s;
}

}  // namespace plap
