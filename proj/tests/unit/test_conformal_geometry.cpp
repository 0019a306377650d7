#include <doctest.h>

#include <cmath>
#include <numbers>

#include "confbaryo/conformal_geometry.hpp"

using namespace cb;

namespace {

double sym_diff(const OperatorSymbol& a, const OperatorSymbol& b) {
  double m = max_abs(a.d - b.d);
  for (size_t i = 0; i < 3; ++i) m = std::max(m, max_abs(a.c[i] - b.c[i]));
  return m;
}

double coeff_diff(const Scenario2Coeffs& a, const Scenario2Coeffs& b) {
  double m = std::max(std::abs(a.c1 - b.c1), std::abs(a.c5 - b.c5));
  for (size_t i = 0; i < 3; ++i) {
    m = std::max({m, std::abs(a.c2[i] - b.c2[i]), std::abs(a.c3[i] - b.c3[i])});
    for (size_t r = 0; r < 4; ++r) m = std::max(m, std::abs(a.c4[i][r] - b.c4[i][r]));
  }
  return m;
}

const ConformalProfile& bump() {
  static const ConformalProfile p = ConformalProfile::gaussian_bump(0.3, 1.1, 0.2, Vec3(0.1, -0.2, 0.3));
  return p;
}

FieldJet sample_field() {
  const SliceField F =
      SliceField::gaussian(0.4, 1.2, Vec3(0.1, 0.0, -0.1), Vec3(0.2, -0.1, 0.15), 0.9, Vec3(0.0, 0.3, 0.0), 0.5);
  return F.jet(Vec3(0.3, -0.4, 0.2));
}

}  // namespace

TEST_CASE("flat Christoffel symbols in spherical coordinates") {
  const SphericalPoint p{2.0, 0.7, 1.1};
  const ChristoffelTable G = christoffel(ConformalProfile::minkowski(), 0.0, p);
  CHECK(G(1, 2, 2) == doctest::Approx(-2.0));
  CHECK(G(2, 1, 2) == doctest::Approx(0.5));
  CHECK(G(3, 2, 3) == doctest::Approx(std::cos(0.7) / std::sin(0.7)));
  CHECK(G(0, 0, 0) == 0.0);
}

TEST_CASE("FLRW Christoffel symbols carry the Hubble rate") {
  const ConformalProfile P = ConformalProfile::flrw_exponential(1.5, 0.3);
  const SphericalPoint p{1.0, 1.0, 0.5};
  const ChristoffelTable G = christoffel(P, 0.4, p);
  CHECK(G(0, 0, 0) == doctest::Approx(0.3));
  CHECK(G(0, 1, 1) == doctest::Approx(0.3));
  CHECK(G(1, 0, 1) == doctest::Approx(0.3));
}

TEST_CASE("closed-form Christoffel symbols match the metric finite differences") {
  for (const SphericalPoint& p : {SphericalPoint{0.7, 0.9, 0.3}, SphericalPoint{1.8, 2.1, 4.0}}) {
    const ChristoffelTable a = christoffel(bump(), 0.5, p);
    const ChristoffelTable b = christoffel_fd(bump(), 0.5, p);
    double d = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(a(i, j, k) - b(i, j, k)));
    CHECK(d / a.max_abs() < 1e-6);
  }
  CHECK_THROWS_AS(christoffel(bump(), 0.0, SphericalPoint{1.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("spin connection: closed form equals the general contraction") {
  const SphericalPoint p{1.3, 1.1, 2.2};
  const auto a = spin_connection_corrections(bump(), 0.35, p);
  const auto b = spin_connection_general(bump(), 0.35, p);
  for (size_t mu = 0; mu < 4; ++mu) CHECK(max_abs(a[mu] - b[mu]) < 1e-12);
  const auto flat = spin_connection_corrections(ConformalProfile::minkowski(), 0.0, p);
  for (size_t mu = 0; mu < 4; ++mu) CHECK(max_abs(flat[mu]) == 0.0);
}

TEST_CASE("H~_eta symbol") {
  const GammaBasis& g = dirac_gammas();
  const OperatorSymbol s = h_eta_tilde_symbol(ConformalProfile::minkowski(), 0.0, Vec3(0.1, 0.2, 0.3), 0.8);
  for (int i = 0; i < 3; ++i) CHECK(max_abs(s.c[static_cast<size_t>(i)] + I * g[0] * g[i + 1]) == 0.0);
  CHECK(max_abs(s.d - 0.8 * g[0]) == 0.0);
  // Spherical form equals the Cartesian one re-expressed in the chart.
  const SphericalPoint p{1.2, 0.8, 2.5};
  const Vec3 x = spherical_to_cartesian(p);
  const OperatorSymbol a = to_spherical(h_eta_tilde_symbol(bump(), 0.4, x, 0.5), p);
  const OperatorSymbol b = h_eta_tilde_symbol_spherical(bump(), 0.4, p, 0.5);
  CHECK(sym_diff(a, b) < 1e-12);
}

TEST_CASE("A_t with u = d_t is H~_eta plus the mass correction") {
  const Vec3 x(0.2, -0.1, 0.4);
  const double m = 0.7;
  const OperatorSymbol A = symmetrized_hamiltonian_symbol(bump(), 0.5, x, VectorFieldJet::time_direction(), m);
  OperatorSymbol H = h_eta_tilde_symbol(bump(), 0.5, x, m);
  H.d += (m * bump().jet(0.5, x).delta) * dirac_gammas()[0];
  CHECK(sym_diff(A, H) < 1e-15);
  VectorFieldJet spacelike;
  spacelike.u = Vec3(2.0, 0.0, 0.0);
  CHECK_THROWS_AS(symmetrized_hamiltonian_symbol(bump(), 0.5, x, spacelike, m), DomainError);
}

TEST_CASE("alpha coefficients are the lambda-derivative of A_t") {
  // A_t is linear in u, so (A(lambda) - A(0)) / lambda reproduces the alpha symbol.
  // Massless: the alpha set carries no f m Omega gamma^0 piece.
  const FieldJet F = sample_field();
  const Vec3 x(0.3, -0.4, 0.2);
  const double m = 0.0, lam = 0.25, t = 0.45;
  const OperatorSymbol A1 = symmetrized_hamiltonian_symbol(bump(), t, x, VectorFieldJet::from_field(F, lam), m);
  const OperatorSymbol A0 = symmetrized_hamiltonian_symbol(bump(), t, x, VectorFieldJet::time_direction(), m);
  OperatorSymbol D;
  D.d = (A1.d - A0.d) / lam;
  for (size_t i = 0; i < 3; ++i) D.c[i] = (A1.c[i] - A0.c[i]) / lam;
  const OperatorSymbol S = symbol_from_coeffs(scenario2_alpha_coeffs(bump(), t, x, F));
  CHECK(sym_diff(D, S) < 1e-13);
}

TEST_CASE("beta coefficients are the time derivative of the alpha coefficients") {
  const FieldJet F = sample_field();
  const Vec3 x(0.3, -0.4, 0.2);
  const double t = 0.45, h = 1e-4;
  for (Dynamics dyn : {Dynamics::linearized, Dynamics::canonical}) {
    FieldJet G = F;
    if (dyn == Dynamics::canonical) G.f += 1.0;  // keep 1/f finite
    const FieldRates R = field_rates(G, dyn);
    auto shifted = [&](double s) {
      FieldJet J = G;
      J.f += s * R.fdot;
      J.grad_f += s * R.grad_fdot;
      J.X += s * R.Xdot;
      J.jacX(0, 0) += s * R.div_Xdot;  // only the trace enters
      return J;
    };
    const Scenario2Coeffs ap = scenario2_alpha_coeffs(bump(), t + h, x, shifted(h));
    const Scenario2Coeffs am = scenario2_alpha_coeffs(bump(), t - h, x, shifted(-h));
    Scenario2Coeffs fd;
    fd.c1 = (ap.c1 - am.c1) / (2.0 * h);
    fd.c5 = (ap.c5 - am.c5) / (2.0 * h);
    for (size_t i = 0; i < 3; ++i) {
      fd.c2[i] = (ap.c2[i] - am.c2[i]) / (2.0 * h);
      fd.c3[i] = (ap.c3[i] - am.c3[i]) / (2.0 * h);
      for (size_t r = 0; r < 4; ++r) fd.c4[i][r] = (ap.c4[i][r] - am.c4[i][r]) / (2.0 * h);
    }
    const Scenario2Coeffs beta = scenario2_beta_coeffs(bump(), t, x, G, dyn);
    CHECK(coeff_diff(fd, beta) < 1e-6);
  }
}

TEST_CASE("conjugation adds s omega_mu c^mu") {
  CHECK(conjugation_factor(Conjugation::forward, T1Convention::exact) == -1.5);
  CHECK(conjugation_factor(Conjugation::reverse, T1Convention::exact) == 1.5);
  CHECK(conjugation_factor(Conjugation::forward, T1Convention::three_quarters) == 0.75);
  const OperatorSymbol s = h_eta_tilde_symbol(ConformalProfile::minkowski(), 0.0, Vec3::Zero(), 0.0);
  const Vec3 w(0.2, -0.1, 0.3);
  const ConjugatedSymbol c = conjugate_symbol(s, w, Conjugation::forward);
  Mat4 T = Mat4::Zero();
  for (int i = 0; i < 3; ++i) T += (-1.5 * w[i]) * s.c[static_cast<size_t>(i)];
  CHECK(max_abs(c.T - T) < 1e-15);
  CHECK(sym_diff(c.L, s) == 0.0);
}

TEST_CASE("spherical re-expression of coefficient sets is consistent with the symbols") {
  const FieldJet F = sample_field();
  const SphericalPoint p{0.9, 1.3, 0.4};
  const Vec3 x = spherical_to_cartesian(p);
  const Scenario2Coeffs c = scenario2_alpha_coeffs(bump(), 0.3, x, F);
  const Scenario2Coeffs s = to_spherical(c, p);
  CHECK(s.chart == Chart::spherical);
  CHECK(s.c1 == c.c1);
  CHECK(s.max_abs() > 0.0);
  CHECK_THROWS_AS(symbol_from_coeffs(s), DomainError);
}

TEST_CASE("omega log jet of an exponential scale factor") {
  const ConformalProfile P = ConformalProfile::flrw_exponential(2.0, 0.4);
  const OmegaLogJet o = omega_log_jet(P.jet(1.3, Vec3::Zero()));
  CHECK(o.w_t == doctest::Approx(0.4));
  CHECK(std::abs(o.wdot_t) < 1e-15);
  CHECK(o.w.norm() == 0.0);
}

TEST_CASE("grid operator is exact on linear spinors in the interior") {
  const int n = 9;
  const SpinorGrid psi = SpinorGrid::sample(
      [](const Vec3& x) { return Eigen::Vector4cd(cplx(x[0], 0.0), cplx(0.0, 2.0 * x[1]), cplx(x[2], x[0]), 1.0); }, n,
      0.25, Vec3::Constant(-1.0));
  OperatorSymbol s;
  s.c[0] = Mat4::Identity();
  s.c[1] = 2.0 * Mat4::Identity();
  const SpinorGrid out = apply_symbol([&](const Vec3&) { return s; }, psi);
  const Eigen::Vector4cd expect(cplx(1.0, 0.0), cplx(0.0, 4.0), cplx(0.0, 1.0), 0.0);
  CHECK((out.v[out.idx(4, 4, 4)] - expect).norm() < 1e-13);
  const cplx one = grid_inner(psi, psi, [](const Vec3&) { return 1.0; });
  CHECK(one.real() > 0.0);
  CHECK(std::abs(one.imag()) < 1e-14);
}
