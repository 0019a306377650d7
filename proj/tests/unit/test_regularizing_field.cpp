#include <doctest.h>

#include <cmath>

#include "confbaryo/regularizing_field.hpp"

using namespace cb;

namespace {
SliceField field(double lambda) {
  return SliceField::gaussian(0.2, 1.0, Vec3(0.1, 0.0, 0.0), Vec3(0.1, -0.05, 0.08), 1.2, Vec3(0.0, 0.2, 0.0), lambda);
}
}  // namespace

TEST_CASE("Gaussian field jet: derivatives against central differences") {
  const SliceField F = field(0.3);
  const Vec3 x(0.4, -0.3, 0.5);
  const FieldJet j = F.jet(x);
  const double h = 1e-5;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = h;
    CHECK(j.grad_f[a] == doctest::Approx((F.f(x + e) - F.f(x - e)) / (2.0 * h)).epsilon(1e-8));
    for (int b = 0; b < 3; ++b)
      CHECK(j.jacX(a, b) == doctest::Approx((F.X(x + e)[b] - F.X(x - e)[b]) / (2.0 * h)).epsilon(1e-7));
    CHECK(j.grad_divX[a] == doctest::Approx((F.jet(x + e).divX() - F.jet(x - e).divX()) / (2.0 * h)).epsilon(1e-6));
  }
  double lap = 0.0;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = 1e-4;
    lap += (F.f(x + e) - 2.0 * F.f(x) + F.f(x - e)) / 1e-8;
  }
  CHECK(j.lap_f == doctest::Approx(lap).epsilon(1e-6));
  CHECK(F.support_radius.has_value());
  CHECK_FALSE(F.identically_zero);
  CHECK(SliceField::zero().identically_zero);
}

TEST_CASE("field rates for both readings of the X law") {
  FieldJet j;
  j.f = 2.0;
  j.grad_f = Vec3(0.4, 0.0, -0.2);
  j.lap_f = 0.3;
  j.jacX(0, 0) = 0.6;
  const FieldRates lin = field_rates(j, Dynamics::linearized);
  CHECK(lin.fdot == doctest::Approx(0.2));
  CHECK((lin.Xdot - j.grad_f).norm() == 0.0);
  CHECK(lin.div_Xdot == doctest::Approx(0.3));
  // dX/dt = -grad(1/f) = grad f / f^2
  const FieldRates can = field_rates(j, Dynamics::canonical);
  CHECK((can.Xdot - j.grad_f / 4.0).norm() < 1e-15);
  j.f = 0.0;
  CHECK_THROWS_AS(field_rates(j, Dynamics::canonical), DomainError);
}

TEST_CASE("lambda = 0 leaves the grid field unchanged") {
  const GridSliceField g = GridSliceField::sample(field(0.0), 12, 4.0);
  for (Integrator in : {Integrator::euler, Integrator::rk4})
    CHECK(g.max_abs_diff(evolve_first_order(g, 0.1, Dynamics::linearized, in)) == 0.0);
}

TEST_CASE("constant f with discrete-divergence-free X is a fixed point") {
  const GridSliceField g = divergence_free_grid(0.8, 0.5, 20, 3.0);
  for (Integrator in : {Integrator::euler, Integrator::rk4}) {
    CHECK(g.max_abs_diff(evolve_first_order(g, 0.05, Dynamics::linearized, in)) < 1e-12);
    CHECK(g.max_abs_diff(evolve_first_order(g, 0.05, Dynamics::canonical, in)) < 1e-12);
  }
}

TEST_CASE("nonzero field evolves and the two integrators agree to O(dt^2)") {
  const GridSliceField g = GridSliceField::sample(field(0.5), 16, 4.0);
  const GridSliceField e = evolve_first_order(g, 0.01, Dynamics::linearized, Integrator::euler);
  const GridSliceField r = evolve_first_order(g, 0.01, Dynamics::linearized, Integrator::rk4);
  CHECK(g.max_abs_diff(e) > 1e-5);
  CHECK(e.max_abs_diff(r) < 1e-5);
  CHECK(g.max_outside(3.9) < 1e-3);
}

TEST_CASE("canonical dynamics rejects nonpositive f on the grid") {
  const GridSliceField g = GridSliceField::sample(field(0.5), 8, 3.0);
  CHECK_THROWS_AS(evolve_first_order(g, 0.01, Dynamics::canonical), DomainError);
}

TEST_CASE("bundle directions come in antipodal pairs with uniform weights") {
  const NullBundleSample b = uniform_bundle(100);
  REQUIRE(b.directions.size() == 100);
  double W = 0.0;
  for (size_t i = 0; i < b.directions.size(); i += 2) {
    CHECK((b.directions[i] + b.directions[i + 1]).norm() == 0.0);
    CHECK(b.directions[i].norm() == doctest::Approx(1.0));
  }
  for (double w : b.weights) W += w;
  CHECK(W == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(uniform_bundle(1), DomainError);
}

TEST_CASE("geodesic oracle: lambda = 0 gives the time direction exactly") {
  for (int n : {10, 64, 401}) {
    GeodesicOracleOptions o;
    o.n_dirs = n;
    const Eigen::Vector4d u = geodesic_bundle_oracle(field(0.0), 0.2, Vec3(0.3, 0.1, -0.2), o);
    CHECK(u[0] == 1.0);
    CHECK(u.tail<3>().norm() == 0.0);
  }
}

TEST_CASE("geodesic oracle drifts along the field gradient for small lambda") {
  // f bump at the origin and X = 0: the spatial part lies along grad f at q.
  const SliceField F = SliceField::gaussian(0.3, 1.0, Vec3::Zero(), Vec3::Zero(), 1.0, Vec3::Zero(), 0.2);
  const Vec3 q(0.5, 0.0, 0.0);
  const Eigen::Vector4d u = geodesic_bundle_oracle(F, 0.3, q);
  CHECK(u[0] > 0.0);
  CHECK(u[0] * u[0] - u.tail<3>().squaredNorm() > 0.0);
  CHECK(std::abs(u[1]) > 0.0);
  CHECK(std::abs(u[2]) < 0.1 * std::abs(u[1]));
  CHECK(std::abs(u[3]) < 0.1 * std::abs(u[1]));
}

TEST_CASE("conformal invariance of the oracle") {
  const SliceField F = field(0.4);
  const std::vector<Vec3> qs = {Vec3::Zero(), Vec3(0.6, -0.2, 0.1)};
  const auto c = conformal_invariance_check(F, 0.1, ConformalProfile::flrw_polynomial({2.0}), qs, 200);
  CHECK(c.max_deviation <= 1e-12);
  CHECK(c.rhs_metric_free);
  CHECK(c.points == 2);
  const auto b = conformal_invariance_check(F, 0.1, ConformalProfile::gaussian_bump(0.5, 0.8, 0.0), qs, 200);
  CHECK(b.max_deviation <= 1e-12);
}
