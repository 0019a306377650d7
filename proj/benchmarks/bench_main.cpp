#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "confbaryo/baryo_rate.hpp"

using namespace cb;

namespace {

std::vector<std::pair<Vec3, Vec3>> momenta(int n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<std::pair<Vec3, Vec3>> v;
  for (int i = 0; i < n; ++i) v.push_back({Vec3(g(rng), g(rng), g(rng)), Vec3(g(rng), g(rng), g(rng))});
  return v;
}

void BM_gamma_kernel(benchmark::State& st) {
  const auto ks = momenta(1024);
  size_t i = 0;
  for (auto _ : st) {
    const auto& [k, kp] = ks[i++ & 1023];
    benchmark::DoNotOptimize(gamma_kernel(k, kp, 1.0));
  }
}
BENCHMARK(BM_gamma_kernel);

void BM_chi_closed_form(benchmark::State& st) {
  const auto ks = momenta(1024);
  size_t i = 0;
  for (auto _ : st) {
    const auto& [k, kp] = ks[i++ & 1023];
    const double w = std::sqrt(k.squaredNorm() + 1.0), wp = std::sqrt(kp.squaredNorm() + 1.0);
    benchmark::DoNotOptimize(chi_closed_form(w, wp, k, kp, 1.0, ChiVariant::gamma0_pair));
  }
}
BENCHMARK(BM_chi_closed_form);

void BM_k_kernel(benchmark::State& st) {
  CutoffConfig cut;
  QuadConfig q;
  q.rel_tol = 1e-9;
  for (auto _ : st) benchmark::DoNotOptimize(k_kernel(1.0, cut, q).value);
}
BENCHMARK(BM_k_kernel)->Unit(benchmark::kMillisecond);

void BM_reduced_rate(benchmark::State& st) {
  RateRequest r;
  r.profile = ConformalProfile::gaussian_bump(0.1, 1.0, 0.0);
  r.t = 0.5;
  r.cutoffs.m = 1.0;
  r.quad.rel_tol = 1e-8;
  for (auto _ : st) benchmark::DoNotOptimize(rate_scenario1(r).B2);
}
BENCHMARK(BM_reduced_rate)->Unit(benchmark::kMillisecond);

void BM_generic_mc(benchmark::State& st) {
  const Vertex v = Vertex::multiplication(dirac_gammas()[0], [](const Vec3& q) { return cplx(std::exp(-0.25 * q.squaredNorm()), 0.0); });
  CutoffConfig cut;
  QuadConfig q;
  q.mc_samples = st.range(0);
  for (auto _ : st) benchmark::DoNotOptimize(i_ab(v, v, cut, q, 20).value);
  st.SetItemsProcessed(st.iterations() * st.range(0) * 40);
}
BENCHMARK(BM_generic_mc)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
