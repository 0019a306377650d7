#include <doctest.h>

#include <cmath>
#include <numbers>

#include "confbaryo/profile_fourier.hpp"

using namespace cb;

namespace {
QuadConfig tight() {
  QuadConfig q;
  q.rel_tol = 1e-12;
  q.abs_tol = 0.0;
  return q;
}
}  // namespace

TEST_CASE("convention description") {
  CHECK(FourierConvention::norm() == doctest::Approx(1.0 / std::pow(2.0 * std::numbers::pi, 3)));
  CHECK(FourierConvention::describe().find("exp(-i p.x)") != std::string::npos);
}

TEST_CASE("radial transform of a polynomial bump against mpmath") {
  // (1 - s^2)^2 on [0, 1]; reference: tests/oracle/generate_oracles.py.
  const RadialProfile b{[](double s) { return (1.0 - s * s) * (1.0 - s * s); }, 1.0};
  const QuadConfig q = tight();
  CHECK(radial_hat(b, 0.0, q).re() == doctest::Approx(0.0038598546149462008169).epsilon(1e-12));
  CHECK(radial_hat(b, 0.5, q).re() == doctest::Approx(0.0038065491459429859992).epsilon(1e-12));
  CHECK(radial_hat(b, 3.0, q).re() == doctest::Approx(0.0022823784254397542067).epsilon(1e-12));
  CHECK(radial_hat(b, 12.0, q).re() == doctest::Approx(0.000019927695850230720329).epsilon(1e-10));
  CHECK_THROWS_AS(radial_hat(b, -1.0, q), DomainError);
}

TEST_CASE("Gaussian closed form") {
  const RadialProfile g{[](double s) { return std::exp(-s * s / 2.0); }, 9.0};
  const QuadConfig q = tight();
  for (double rho : {0.0, 0.3, 1.0, 2.5, 4.0})
    CHECK(std::abs(radial_hat(g, rho, q).re() - gaussian_hat(1.0, rho)) < 1e-8 * gaussian_hat(1.0, 0.0));
  // Width scaling: hat_w(rho) = w^3 hat_1(w rho).
  CHECK(gaussian_hat(2.0, 0.7) == doctest::Approx(8.0 * gaussian_hat(1.0, 1.4)).epsilon(1e-15));
}

TEST_CASE("grid transform: reality pairing and agreement with the radial path") {
  auto f = [](const Vec3& x) { return std::exp(-(x - Vec3(0.2, 0.0, -0.3)).squaredNorm() / 2.0); };
  const GridField3 g = GridField3::centered(f, 28, 8.0);
  const Vec3 p(0.4, -0.9, 1.1);
  const cplx a = field_hat_3d(g, p), b = field_hat_3d(g, -p);
  CHECK(std::abs(a - std::conj(b)) < 1e-15);
  // Translation only changes the phase.
  const double rad = radial_hat(RadialProfile{[](double s) { return std::exp(-s * s / 2.0); }, 9.0}, p.norm(), tight()).re();
  CHECK(std::abs(std::abs(a) - rad) < 1e-8);
  CHECK(std::arg(a) == doctest::Approx(std::remainder(-p.dot(Vec3(0.2, 0.0, -0.3)), 2.0 * std::numbers::pi)).epsilon(1e-8));
}

TEST_CASE("support check rejects truncated fields") {
  const GridField3 g = GridField3::centered([](const Vec3& x) { return std::exp(-x.squaredNorm()); }, 12, 1.0);
  CHECK(g.boundary_max() > 1e-3);
  CHECK_THROWS_AS(check_grid_support(g), DomainError);
  CHECK_THROWS_AS(field_hat_3d(g, Vec3::Zero()), DomainError);
  cplx out;
  CHECK_NOTHROW(field_hats_3d({&g}, Vec3::Zero(), &out, false));
}

TEST_CASE("fields on different grids cannot be transformed together") {
  const GridField3 a = GridField3::centered([](const Vec3&) { return 0.0; }, 8, 1.0);
  const GridField3 b = GridField3::centered([](const Vec3&) { return 0.0; }, 8, 2.0);
  cplx out[2];
  CHECK_THROWS_AS(field_hats_3d({&a, &b}, Vec3::Zero(), out), DomainError);
}
