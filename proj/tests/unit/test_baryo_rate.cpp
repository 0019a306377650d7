#include <doctest.h>

#include <cmath>

#include "confbaryo/baryo_rate.hpp"

using namespace cb;

namespace {

RateRequest request(Scenario s, const ConformalProfile& P, double t, double m) {
  RateRequest q;
  q.scenario = s;
  q.profile = P;
  q.t = t;
  q.cutoffs.m = m;
  return q;
}

RateRequest small_scenario2(double lambda) {
  RateRequest q = request(Scenario::scenario2, ConformalProfile::gaussian_bump(0.1, 1.0, 0.0), 0.4, 0.0);
  q.field = SliceField::gaussian(0.05, 1.0, Vec3::Zero(), Vec3(0.02, 0.01, 0.03), 1.2, Vec3(0.2, 0.0, 0.0), lambda);
  q.options.grid_n = 16;
  q.options.inner_samples = 8;
  q.quad.mc_samples = 100;
  return q;
}

double mat_dist(const Mat4& a, const Mat4& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("orders zero and one vanish") {
  const LowerOrders lo = b0_and_b1();
  CHECK(lo.b0 == 0.0);
  CHECK(lo.b1 == 0.0);
  CHECK_FALSE(lo.rationale.empty());
}

TEST_CASE("normalization factors") {
  CHECK(normalization_factor(Normalization::theorem) == -0.25);
  CHECK(normalization_factor(Normalization::derivation) == 1.0);
  const auto rec = convention_record(RateOptions{});
  bool found = false;
  for (const auto& [k, v] : rec) found = found || k == "normalization";
  CHECK(found);
}

TEST_CASE("Chebyshev table interpolates a smooth function") {
  const ChebyshevTable t(0.0, 3.0, 30, [](double x) { return std::cos(x); });
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double x = 3.0 * i / 200.0;
    worst = std::max(worst, std::abs(t(x) - std::cos(x)));
  }
  CHECK(worst < 1e-13);
  CHECK(t.tail_estimate() < 1e-14);
  CHECK(t.nodes().size() == 30);
  CHECK_THROWS_AS(ChebyshevTable(1.0, 1.0, 10, [](double x) { return x; }), DomainError);
}

TEST_CASE("exact zeros carry a reason") {
  const ConformalProfile bump = ConformalProfile::gaussian_bump(0.1, 1.0, 0.0);
  RateReport r = compute_rate(request(Scenario::scenario1, ConformalProfile::minkowski(), 0.3, 1.0));
  CHECK(r.B2 == 0.0);
  CHECK(r.reason == "ΔA=0");
  r = compute_rate(request(Scenario::scenario1, bump, 0.5, 0.0));
  CHECK(r.B2 == 0.0);
  CHECK(r.reason == "m=0");
  r = compute_rate(request(Scenario::scenario1, bump, 0.0, 1.0));
  CHECK(r.B2 == 0.0);
  CHECK(r.reason == "alpha1_hat*alpha2_hat=0");
  r = compute_rate(request(Scenario::scenario1, ConformalProfile::flrw_polynomial({1.0, 0.3}), 0.7, 0.0));
  CHECK(r.B2 == 0.0);
  CHECK(r.path == "exact_zero");

  RateRequest s2 = small_scenario2(0.1);
  s2.field = SliceField::zero();
  s2.field->lambda = 0.1;
  r = compute_rate(s2);
  CHECK(r.B2 == 0.0);
  CHECK(r.reason == "f=0, X=0");
  s2 = small_scenario2(0.0);
  r = compute_rate(s2);
  CHECK(r.B2 == 0.0);
  CHECK(r.reason == "ΔA=0");
}

TEST_CASE("scenario preconditions") {
  const ConformalProfile bump = ConformalProfile::gaussian_bump(0.1, 1.0, 0.0);
  CHECK_THROWS_AS(rate_scenario1(request(Scenario::scenario1, ConformalProfile::flrw_polynomial({1.0, 0.3}), 0.5, 1.0)),
                  DomainError);
  RateRequest q = request(Scenario::scenario1, bump, 0.5, 1.0);
  q.field = SliceField::gaussian(0.1, 1.0, Vec3::Zero(), Vec3::Zero(), 1.0, Vec3::Zero(), 0.2);
  CHECK_THROWS_AS(rate_scenario1(q), DomainError);
  RateRequest s2 = small_scenario2(0.1);
  s2.cutoffs.m = 0.5;
  CHECK_THROWS_AS(rate_scenario2(s2), DomainError);
  q = request(Scenario::scenario1, bump, 0.5, 2.0);
  CHECK_THROWS_AS(rate_scenario1(q), DomainError);  // m >= Lambda / mass_factor
}

TEST_CASE("reduced scenario-1 rate matches the independent oracle") {
  // generate_oracles.py: bump A=0.1, w=1, t=0.5, m=1, Lambda=10, eps=1e-3, theorem normalization
  RateRequest q = request(Scenario::scenario1, ConformalProfile::gaussian_bump(0.1, 1.0, 0.0), 0.5, 1.0);
  q.quad.abs_tol = 0.0;
  const RateReport r = rate_scenario1(q);
  CHECK(r.path == "reduced_1d");
  CHECK(r.converged);
  CHECK(r.B2 == doctest::Approx(-3.607237533078143e-08).epsilon(1e-7));
  CHECK(r.B2_imag == 0.0);
  CHECK_FALSE(r.k_table.rows.empty());

  RateRequest d = q;
  d.options.normalization = Normalization::derivation;
  CHECK(rate_scenario1(d).B2 == doctest::Approx(-4.0 * r.B2).epsilon(1e-12));
}

TEST_CASE("scenario-1 rate is odd under time reflection about the bump center") {
  const ConformalProfile bump = ConformalProfile::gaussian_bump(0.1, 1.0, 0.2);
  for (double tau : {0.3, 0.8}) {
    const double plus = rate_scenario1(request(Scenario::scenario1, bump, 0.2 + tau, 1.0)).B2;
    const double minus = rate_scenario1(request(Scenario::scenario1, bump, 0.2 - tau, 1.0)).B2;
    CHECK(plus != 0.0);
    CHECK(plus == doctest::Approx(-minus).epsilon(1e-10));
  }
}

TEST_CASE("scenario-1 rate scales quadratically with the perturbation") {
  const ConformalProfile base = ConformalProfile::gaussian_bump(0.1, 1.0, 0.0);
  RateRequest q = request(Scenario::scenario1, base, 0.5, 1.0);
  q.quad.abs_tol = 0.0;
  const double b1 = rate_scenario1(q).B2;
  q.profile = ConformalProfile::scaled(base, 2.5);
  CHECK(rate_scenario1(q).B2 == doctest::Approx(6.25 * b1).epsilon(1e-10));
}

TEST_CASE("scenario-2 rate scales with lambda squared and is real") {
  const RateReport a = rate_scenario2(small_scenario2(0.1));
  const RateReport b = rate_scenario2(small_scenario2(0.2));
  CHECK(a.path == "vertex_mc");
  CHECK(a.B2 != 0.0);
  CHECK(b.B2 == doctest::Approx(4.0 * a.B2).epsilon(1e-10));
  CHECK(std::abs(a.B2_imag) <= 1e-12 * std::abs(a.B2));
  CHECK(a.terms.size() >= 8);
}

TEST_CASE("mixed scenario reduces to scenario 1 when the field vanishes") {
  RateRequest q = request(Scenario::mixed, ConformalProfile::gaussian_bump(0.1, 1.0, 0.0), 0.5, 1.0);
  q.field = SliceField::zero();
  const RateReport mx = rate_mixed(q);
  RateRequest s1 = q;
  s1.scenario = Scenario::scenario1;
  s1.field.reset();
  const RateReport r1 = rate_scenario1(s1);
  CHECK(mx.B2 == doctest::Approx(r1.B2).epsilon(1e-12));
}

TEST_CASE("Weyl densities agree with the conjugated operator symbols") {
  const ConformalProfile P = ConformalProfile::gaussian_bump(0.2, 1.1, 0.05, Vec3(0.1, 0.0, -0.1));
  const SliceField F =
      SliceField::gaussian(0.3, 1.2, Vec3(0.1, -0.2, 0.0), Vec3(0.2, -0.1, 0.15), 1.0, Vec3(0.0, 0.1, 0.2), 0.1);
  const double t = 0.35;
  const Dynamics dyn = Dynamics::linearized;
  const double hfd = 1e-4;
  const std::vector<Vec3> pts = {Vec3(0.3, -0.2, 0.4), Vec3(-0.5, 0.1, 0.2), Vec3(0.0, 0.6, -0.3)};

  for (Conjugation dir : {Conjugation::forward, Conjugation::reverse}) {
    const double s = conjugation_factor(dir, T1Convention::exact);
    for (int which = 0; which < 2; ++which) {
      auto symbol_at = [&](const Vec3& x) {
        const FieldJet j = F.jet(x);
        return which == 0 ? symbol_from_coeffs(scenario2_alpha_coeffs(P, t, x, j), true)
                          : symbol_from_coeffs(scenario2_beta_coeffs(P, t, x, j, dyn), true);
      };
      for (const Vec3& x : pts) {
        const OperatorSymbol sym = symbol_at(x);
        const OmegaLogJet w = omega_log_jet(P.jet(t, x));
        const ConjugatedSymbol cs = conjugate_symbol(sym, w.w, dir, T1Convention::exact);
        Mat4 div = Mat4::Zero();
        for (int mu = 0; mu < 3; ++mu) {
          Vec3 e = Vec3::Zero();
          e[mu] = hfd;
          const auto m = static_cast<size_t>(mu);
          div += (symbol_at(x + e).c[m] - symbol_at(x - e).c[m]) / (2.0 * hfd);
        }
        Mat4 h = cs.T + cs.L.d - 0.5 * div;
        if (which == 1) {
          // d/dt of the alpha-side multiplication term picks up omega-dot
          const OperatorSymbol a = symbol_from_coeffs(scenario2_alpha_coeffs(P, t, x, F.jet(x)), true);
          for (int mu = 0; mu < 3; ++mu) h += s * w.wdot[mu] * a.c[static_cast<size_t>(mu)];
        }
        const WeylDensity wd = scenario2_weyl_density(scenario2_fields(P, t, x, F.jet(x), dyn), which, s);
        const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
        for (int mu = 0; mu < 3; ++mu) {
          const auto m = static_cast<size_t>(mu);
          CHECK(mat_dist(wd.a[m], cs.L.c[m]) < 1e-13);
        }
        CHECK(mat_dist(wd.h, h) / scale < 1e-7);
      }
    }
  }
}

TEST_CASE("mixed scenario on flat background is the pure scenario-2 value") {
  RateRequest s2 = small_scenario2(0.1);
  s2.profile = ConformalProfile::minkowski();
  RateRequest mx = s2;
  mx.scenario = Scenario::mixed;
  mx.cutoffs.m = 1.0;
  const RateReport a = rate_scenario2(s2);
  const RateReport b = rate_mixed(mx);
  CHECK(a.B2 != 0.0);
  CHECK(b.B2 == doctest::Approx(a.B2).epsilon(1e-12));
}

TEST_CASE("generic rate: zero and antisymmetric G") {
  CutoffConfig cut;
  QuadConfig q;
  q.mc_samples = 2000;
  const RateReport z = rate_generic(GFunction([](const Vec3&, const Vec3&) { return 0.0; }), cut, q, 20);
  CHECK(z.B2 == 0.0);
  const GFunction anti = [](const Vec3& k, const Vec3& kp) {
    return (k.squaredNorm() - kp.squaredNorm()) * std::exp(-0.5 * (k - kp).squaredNorm());
  };
  const RateReport a = rate_generic(anti, cut, q, 20);
  const RateReport mag =
      rate_generic(GFunction([&](const Vec3& k, const Vec3& kp) { return std::abs(anti(k, kp)); }), cut, q, 20);
  CHECK(mag.B2 != 0.0);
  CHECK(std::abs(a.B2) <= 3.0 * a.error_estimate + 1e-12 * std::abs(mag.B2));
}
