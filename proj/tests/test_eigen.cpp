#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "plap/eigenpair.hpp"

using namespace plap;

TEST_CASE("interval constants for several p") {
  for (double p : {1.5, 2.0, 3.0}) {
    CAPTURE(p);
    const auto d = Domain::interval(1.0, 512);
    const Weight w = Weight::constant(d, 1.0);
    const TorsionData td = solve_torsion(w, p);
    const EigenPair ep = principal_eigenpair(w, p);
    CHECK(ep.converged);
    CHECK(td.alpha() == doctest::Approx(oracle::alpha_1d(p)).epsilon(2e-3));
    CHECK(td.mu() == doctest::Approx(oracle::mu_1d(p)).epsilon(2e-2));
    CHECK(ep.lambda1 == doctest::Approx(oracle::lambda1_1d(p)).epsilon(2e-3));
    const GapReport gap = check_alpha_lt_lambda1(td, ep);
    CHECK(gap.holds);
    CHECK(gap.gap > 1e-3 * ep.lambda1);
  }
}

TEST_CASE("the pi_p oracle reduces to pi for p = 2") {
  CHECK(oracle::lambda1_1d(2.0) == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-14));
  // π_p = 2π/(p sin(π/p)) written through the beta function.
  const double p = 3.0;
  CHECK(2.0 / p * std::beta(1.0 / p, 1.0 - 1.0 / p) ==
        doctest::Approx(2.0 * std::numbers::pi / (p * std::sin(std::numbers::pi / p))).epsilon(1e-12));
}

TEST_CASE("sine eigenfunction for p = 2") {
  const auto d = Domain::interval(1.0, 256);
  const EigenPair ep = principal_eigenpair(Weight::constant(d, 1.0), 2.0);
  CHECK(sup_norm(ep.u1) == doctest::Approx(1.0));
  double err = 0.0;
  for (Index i = 0; i < d->size(); ++i)
    err = std::max(err, std::abs(ep.u1[i] - std::sin(std::numbers::pi * d->coordinates(i).x())));
  CHECK(err < 1e-5);
  // Discrete spectrum of the three-point Laplacian: (4/h²)sin²(πh/2).
  const double h = d->h();
  const double exact = 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h / 2), 2);
  CHECK(ep.lambda1 == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("disc eigenvalue against Bessel and shooting") {
  const double j0 = oracle::bessel_j0_zero();
  CHECK(j0 == doctest::Approx(2.404825557695773).epsilon(1e-12));
  CHECK(oracle::ball_lambda1_shooting(2) == doctest::Approx(j0 * j0).epsilon(1e-8));
  CHECK(oracle::ball_lambda1_shooting(3) == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-8));

  const auto d = Domain::radial_ball(1.0, 2, 512);
  const EigenPair ep = principal_eigenpair(Weight::constant(d, 1.0), 2.0);
  CHECK(ep.lambda1 == doctest::Approx(j0 * j0).epsilon(1e-4));
  for (Index i = 0; i < d->size(); i += 64)
    CHECK(ep.u1[i] == doctest::Approx(std::cyl_bessel_j(0.0, j0 * d->coordinates(i).x())).epsilon(1e-3));
}

TEST_CASE("square eigenvalue") {
  const auto d = Domain::rectangle(1.0, 1.0, 32);
  const EigenPair ep = principal_eigenpair(Weight::constant(d, 1.0), 2.0);
  const double h = d->h();
  const double exact = 8.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h / 2), 2);
  CHECK(ep.lambda1 == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("eigenvalue scales inversely with the weight") {
  const auto d = Domain::interval(1.0, 128);
  const double a = principal_eigenpair(Weight::constant(d, 1.0), 3.0).lambda1;
  const double b = principal_eigenpair(Weight::constant(d, 2.0), 3.0).lambda1;
  CHECK(b == doctest::Approx(a / 2.0).epsilon(1e-8));
}

TEST_CASE("eigenvalue comparison inequality in log form") {
  // λ₁(λ/λ₁)^{k} <= α(λ/α)^{k} with k = (p-1)/(p-q) > 1 and α <= λ₁.
  for (double lam : {0.1, 1.0, 5.0, 50.0}) {
    CHECK(ordering_inequality(8.0, 9.87, lam, 2.0, 1.5));
    const double k = 2.0;
    CHECK(9.87 * std::pow(lam / 9.87, k) <= 8.0 * std::pow(lam / 8.0, k) * (1 + 1e-14));
  }
  CHECK_THROWS(ordering_inequality(8.0, 9.87, 1.0, 2.0, 2.0));
}
