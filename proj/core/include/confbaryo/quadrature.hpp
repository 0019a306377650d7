#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "confbaryo/gamma_algebra.hpp"

namespace cb {

struct QuadConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  long max_evals = 4'000'000;
  long mc_samples = 1'000'000;
  uint64_t seed = 20240611;
  double importance_scale = 1.0;  // decay length of the |q| proposal
  double mc_rel_tol = 0.05;       // acceptance threshold for MC relative standard error
  int threads = 1;
};

struct IntegralResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  long evals = 0;
  bool converged = true;

  double re() const { return value.real(); }
  double im() const { return value.imag(); }
};

// Global adaptive Gauss-Kronrod (10/21 point pair). Returns a non-converged
// result instead of throwing when max_evals is exhausted.
IntegralResult integrate_1d(const std::function<double(double)>& f, double a, double b, const QuadConfig& cfg);

// Integral over [a, inf) through the substitution x = a + u/(1-u).
IntegralResult integrate_1d_semi_infinite(const std::function<double(double)>& f, double a, const QuadConfig& cfg);

struct Box2 {
  double x0, x1, y0, y1;
};

// Nested adaptive rule: outer over x, inner over y.
IntegralResult integrate_2d(const std::function<double(double, double)>& f, const Box2& box, const QuadConfig& cfg);

// Counter-based generator: the stream for sample `index` depends only on
// (seed, index), so results do not depend on how samples are scheduled.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t index) : key_(mix(seed ^ mix(index + 0x9e3779b97f4a7c15ULL))) {}
  uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
  // Uniform in the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
  double normal();
  Vec3 unit_vector();

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

// One importance-weighted estimate f(x)/p(x) for a point drawn from rng.
using McEstimator = std::function<cplx(CounterRng& rng, uint64_t index)>;

// Mean and standard error of cfg.mc_samples estimates. Block sums are
// combined by pairwise summation in a fixed order; the thread count only
// changes who computes each block.
IntegralResult mc_integrate(const McEstimator& estimator, const QuadConfig& cfg);

// Several integrands sharing the same samples; the estimator writes nterms values.
using McMultiEstimator = std::function<void(CounterRng& rng, uint64_t index, cplx* out)>;
std::vector<IntegralResult> mc_integrate_multi(size_t nterms, const McMultiEstimator& estimator, const QuadConfig& cfg);

// Runs fn(i) for i in [0, n) on up to `threads` workers (contiguous chunks).
template <class Fn>
void parallel_for(size_t n, int threads, Fn&& fn) {
  const size_t nt = std::max<size_t>(1, std::min<size_t>(static_cast<size_t>(std::max(threads, 1)), n));
  if (nt == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (size_t t = 0; t < nt; ++t) {
    const size_t lo = n * t / nt, hi = n * (t + 1) / nt;
    pool.emplace_back([lo, hi, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Pairwise (tree) summation of a sequence.
cplx pairwise_sum(const cplx* x, size_t n);
double pairwise_sum(const double* x, size_t n);

}  // namespace cb
