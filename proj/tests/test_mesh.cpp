#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "plap/eigenpair.hpp"

using namespace plap;

TEST_CASE("interval grid layout") {
  const auto d = Domain::interval(1.0, 16);
  CHECK(d->size() == 17);
  CHECK(d->h() == doctest::Approx(1.0 / 16));
  CHECK(d->is_boundary(0));
  CHECK(d->is_boundary(16));
  CHECK(d->interior().size() == 15);
  CHECK(d->mass().sum() == doctest::Approx(1.0));
  CHECK(d->coordinates(4).x() == doctest::Approx(0.25));
}

TEST_CASE("rectangle and ball measures") {
  const auto sq = Domain::rectangle(1.0, 2.0, 8);
  CHECK(sq->cells_y() == 16);
  CHECK(sq->mass().sum() == doctest::Approx(2.0));
  CHECK(sq->is_boundary(sq->node(0, 3)));
  CHECK_FALSE(sq->is_boundary(sq->node(3, 3)));
  CHECK_THROWS(Domain::rectangle(1.0, 0.33, 8));

  // Lumped radial mass integrates r^{N-1}; the sphere area factor is dropped.
  const auto ball = Domain::radial_ball(1.0, 3, 256);
  CHECK_FALSE(ball->is_boundary(0));
  CHECK(ball->is_boundary(256));
  const double m = ball->mass().sum();
  CHECK(m == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("sup norm axioms") {
  const auto d = Domain::interval(1.0, 32);
  const ScalarField f = ScalarField::sample(d, [](const Point& x) { return std::sin(7.0 * x.x()) - 0.3; }, true);
  const ScalarField g = ScalarField::sample(d, [](const Point& x) { return x.x() * x.x(); }, true);
  CHECK(sup_norm(ScalarField::zeros(d)) == 0.0);
  CHECK(sup_norm(f) > 0.0);
  CHECK(sup_norm(f.scaled(-2.5)) == doctest::Approx(2.5 * sup_norm(f)));
  const ScalarField sum(d, f.values() + g.values(), true);
  CHECK(sup_norm(sum) <= sup_norm(f) + sup_norm(g) + 1e-15);
}

TEST_CASE("dirichlet fields are zero on the boundary") {
  const auto d = Domain::rectangle(1.0, 1.0, 8);
  const ScalarField f = ScalarField::sample(d, [](const Point&) { return 1.0; }, true);
  for (Index i = 0; i < d->size(); ++i)
    if (d->is_boundary(i)) CHECK(f[i] == 0.0);
  CHECK_THROWS(Weight(ScalarField::zeros(d)));
  CHECK_THROWS(Weight::constant(d, -1.0));
}

TEST_CASE("gradient magnitude of a linear field") {
  const auto d = Domain::interval(1.0, 64);
  const ScalarField f = ScalarField::sample(d, [](const Point& x) { return 3.0 * x.x(); }, false);
  const ScalarField g = grad_magnitude(f);
  for (Index i = 0; i < d->size(); ++i) CHECK(g[i] == doctest::Approx(3.0));

  const auto sq = Domain::rectangle(1.0, 1.0, 16);
  const ScalarField f2 = ScalarField::sample(sq, [](const Point& x) { return 3.0 * x.x() - 4.0 * x.y(); }, false);
  CHECK(sup_norm(grad_magnitude(f2)) == doctest::Approx(5.0));
}

TEST_CASE("flux divergence is the gradient of the energy") {
  const auto d = Domain::rectangle(1.0, 1.0, 6);
  Vector u = Vector::Zero(d->size());
  for (Index i = 0; i < u.size(); ++i) u[i] = std::sin(1.0 + 0.37 * i);
  for (double p : {1.5, 2.0, 3.0}) {
    const double delta = 1e-3;
    const Vector g = flux_divergence(*d, u, p, delta);
    for (Index i : {Index(8), Index(17), Index(24)}) {
      const double t = 1e-6;
      Vector up = u, um = u;
      up[i] += t;
      um[i] -= t;
      const double fd = (gradient_energy(*d, up, p, delta) - gradient_energy(*d, um, p, delta)) / (2 * t);
      CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("interval torsion matches the closed form") {
  for (double p : {1.5, 2.0, 3.0}) {
    CAPTURE(p);
    const auto d = Domain::interval(1.0, 256);
    const TorsionData td = solve_torsion(Weight::constant(d, 1.0), p);
    CHECK(td.converged);
    double err = 0.0;
    for (Index i = 0; i < d->size(); ++i)
      err = std::max(err, std::abs(td.phi[i] - oracle::torsion_1d(d->coordinates(i).x(), p)));
    CHECK(err < 2e-3 * oracle::torsion_1d(0.5, p));
  }
  // Central differences reproduce the quadratic exactly for p = 2.
  const auto d = Domain::interval(1.0, 64);
  const TorsionData td = solve_torsion(Weight::constant(d, 1.0), 2.0);
  for (Index i = 0; i < d->size(); ++i) {
    const double x = d->coordinates(i).x();
    CHECK(td.phi[i] == doctest::Approx(x * (1 - x) / 2).epsilon(1e-9));
  }
}

TEST_CASE("torsion error decreases under refinement") {
  const double p = 1.5;
  double previous = 0.0;
  for (Index cells : {64, 128, 256}) {
    const auto d = Domain::interval(1.0, cells);
    const TorsionData td = solve_torsion(Weight::constant(d, 1.0), p);
    double err = 0.0;
    for (Index i = 0; i < d->size(); ++i)
      err = std::max(err, std::abs(td.phi[i] - oracle::torsion_1d(d->coordinates(i).x(), p)));
    if (previous > 0.0) CHECK(previous / err > 1.8);
    previous = err;
  }
}

TEST_CASE("radial torsion of the disc") {
  const auto d = Domain::radial_ball(1.0, 2, 256);
  const TorsionData td = solve_torsion(Weight::constant(d, 1.0), 2.0);
  double err = 0.0;
  for (Index i = 0; i < d->size(); ++i)
    err = std::max(err, std::abs(td.phi[i] - oracle::torsion_ball(d->coordinates(i).x(), 2)));
  CHECK(err < 1e-4);
  CHECK(td.alpha() == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(td.mu() == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("square torsion against the sine series") {
  const auto d = Domain::rectangle(1.0, 1.0, 64);
  const TorsionData td = solve_torsion(Weight::constant(d, 1.0), 2.0);
  CHECK(td.sup_phi == doctest::Approx(oracle::square_torsion_center()).epsilon(1e-3));
}

TEST_CASE("ordering comparison") {
  const auto d = Domain::interval(1.0, 16);
  const ScalarField a = ScalarField::sample(d, [](const Point& x) { return x.x() * (1 - x.x()); }, true);
  CHECK(compare_fields(a.scaled(0.5), a).ordered);
  const OrderingReport r = compare_fields(a, a.scaled(0.5));
  CHECK_FALSE(r.ordered);
  CHECK(r.argmin == 8);
  CHECK(r.min_gap == doctest::Approx(-0.125));
}
