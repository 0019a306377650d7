#include <doctest.h>

#include <cmath>
#include <numbers>

#include "confbaryo/quadrature.hpp"

using namespace cb;

TEST_CASE("adaptive 1D rule on smooth integrands") {
  QuadConfig q;
  const IntegralResult a = integrate_1d([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, q);
  CHECK(a.converged);
  CHECK(a.re() == doctest::Approx(2.0).epsilon(1e-13));
  const IntegralResult b = integrate_1d([](double x) { return 1.0 / (1.0 + x * x); }, -1.0, 1.0, q);
  CHECK(b.re() == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-13));
}

TEST_CASE("semi-infinite range") {
  QuadConfig q;
  const IntegralResult a = integrate_1d_semi_infinite([](double x) { return std::exp(-x); }, 0.0, q);
  CHECK(a.re() == doctest::Approx(1.0).epsilon(1e-11));
  const IntegralResult g = integrate_1d_semi_infinite([](double x) { return std::exp(-x * x); }, 0.0, q);
  CHECK(g.re() == doctest::Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(1e-11));
}

TEST_CASE("nested 2D rule") {
  QuadConfig q;
  const IntegralResult a = integrate_2d([](double x, double y) { return x * x * std::cos(y); }, Box2{0.0, 2.0, 0.0, 1.0}, q);
  CHECK(a.re() == doctest::Approx(8.0 / 3.0 * std::sin(1.0)).epsilon(1e-12));
}

TEST_CASE("evaluation budget exhaustion is reported, not thrown") {
  QuadConfig q;
  q.max_evals = 50;
  const IntegralResult a = integrate_1d([](double x) { return std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, q);
  CHECK_FALSE(a.converged);
}

TEST_CASE("counter generator depends only on seed and index") {
  CounterRng a(7, 12), b(7, 12), c(7, 13);
  const uint64_t x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  CounterRng u(1, 1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  CHECK(u.unit_vector().norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Monte Carlo mean lies within four standard errors of the exact value") {
  QuadConfig q;
  q.mc_samples = 20000;
  q.seed = 99;
  // int_0^1 x^2 dx with uniform samples.
  const IntegralResult r = mc_integrate([](CounterRng& rng, uint64_t) {
    const double x = rng.uniform();
    return cplx(x * x, 0.0);
  }, q);
  CHECK(r.error_estimate > 0.0);
  CHECK(std::abs(r.re() - 1.0 / 3.0) < 4.0 * r.error_estimate);
  CHECK(r.evals == 20000);
}

TEST_CASE("Monte Carlo result is independent of the thread count") {
  QuadConfig q;
  q.mc_samples = 5000;
  auto est = [](CounterRng& rng, uint64_t i) { return cplx(std::exp(rng.uniform()) + 1e-3 * static_cast<double>(i % 7), 0.0); };
  const IntegralResult a = mc_integrate(est, q);
  q.threads = 4;
  const IntegralResult b = mc_integrate(est, q);
  CHECK(a.value == b.value);
  CHECK(a.error_estimate == b.error_estimate);
}

TEST_CASE("multi-term estimator shares samples") {
  QuadConfig q;
  q.mc_samples = 3000;
  auto est = [](CounterRng& rng, uint64_t, cplx* out) {
    const double x = rng.uniform();
    out[0] = x;
    out[1] = 2.0 * x;
  };
  const auto r = mc_integrate_multi(2, est, q);
  REQUIRE(r.size() == 2);
  CHECK(r[1].re() == doctest::Approx(2.0 * r[0].re()).epsilon(1e-14));
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1001, 0.1);
  CHECK(pairwise_sum(v.data(), v.size()) == doctest::Approx(100.1).epsilon(1e-15));
  CHECK(pairwise_sum(v.data(), 0) == 0.0);
}
