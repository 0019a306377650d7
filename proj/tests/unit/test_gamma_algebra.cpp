#include <doctest.h>

#include <cmath>
#include <numbers>

#include "confbaryo/gamma_algebra.hpp"

using namespace cb;

TEST_CASE("Clifford relations in the Dirac representation") {
  const GammaBasis& g = dirac_gammas();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      const double eta = mu == nu ? kEta[static_cast<size_t>(mu)] : 0.0;
      CHECK(max_abs(anticommutator(g[mu], g[nu]) - 2.0 * eta * Mat4::Identity()) == 0.0);
    }
}

TEST_CASE("gamma^0 is Hermitian and the spatial gammas anti-Hermitian") {
  const GammaBasis& g = dirac_gammas();
  CHECK(max_abs(g[0] - g[0].adjoint()) == 0.0);
  for (int j = 1; j < 4; ++j) CHECK(max_abs(g[j] + g[j].adjoint()) == 0.0);
}

TEST_CASE("trace identities") {
  const GammaBasis& g = dirac_gammas();
  // Tr(gamma^mu gamma^nu) = 4 eta^{mu nu}
  for (int mu = 0; mu < 4; ++mu) CHECK(std::abs(trace_product({g[mu], g[mu]}) - 4.0 * kEta[static_cast<size_t>(mu)]) < 1e-15);
  // Tr(g0 g1 g0 g1) = -Tr(g0 g0 g1 g1) = 4
  CHECK(std::abs(trace_product({g[0], g[1], g[0], g[1]}) - cplx(4.0, 0.0)) < 1e-15);
  CHECK(std::abs(trace_product({g[1], g[2], g[3]})) == 0.0);
  CHECK_THROWS_AS(trace_product(std::span<const Mat4>{}), DomainError);
}

TEST_CASE("spherical gammas reproduce the inverse spherical metric") {
  const SphericalPoint p{1.7, 0.9, 2.3};
  const SphericalGammas s = spherical_gammas(p);
  const auto ginv = spherical_inverse_metric(p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double gij = i == j ? ginv[static_cast<size_t>(i)] : 0.0;
      CHECK(max_abs(anticommutator(s[static_cast<size_t>(i)], s[static_cast<size_t>(j)]) - 2.0 * gij * Mat4::Identity()) <
            1e-14);
    }
  CHECK(ginv[1] == -1.0);
  CHECK(ginv[2] == doctest::Approx(-1.0 / (1.7 * 1.7)));
}

TEST_CASE("spherical gammas reject the polar axis and the origin") {
  CHECK_THROWS_AS(spherical_gammas(SphericalPoint{1.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(spherical_gammas(SphericalPoint{0.0, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(conformal_gammas(dirac_gammas(), SphericalPoint{1.0, 1.0, 0.0}, 0.0), DomainError);
}

TEST_CASE("conformal gammas scale by 1/Omega") {
  const SphericalPoint p{0.8, 1.2, 0.4};
  const auto a = spherical_gammas(p);
  const auto b = conformal_gammas(dirac_gammas(), p, 2.0);
  for (size_t i = 0; i < 4; ++i) CHECK(max_abs(2.0 * b[i] - a[i]) < 1e-15);
}

TEST_CASE("commutator and anticommutator") {
  const GammaBasis& g = dirac_gammas();
  CHECK(max_abs(commutator(g[1], g[2]) - 2.0 * g[1] * g[2]) == 0.0);
  CHECK(max_abs(anticommutator(g[1], g[1]) + 2.0 * Mat4::Identity()) == 0.0);
}
