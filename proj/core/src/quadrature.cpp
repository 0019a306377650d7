#include "confbaryo/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cb {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
constexpr long kPanelEvals = 21;

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  // max_depth 0: a single Kronrod panel with the embedded Gauss estimate.
  const double v = GK::integrate(f, a, b, 0, 0.0, &err);
  return {a, b, v, err};
}

}  // namespace

IntegralResult integrate_1d(const std::function<double(double)>& f, double a, double b, const QuadConfig& cfg) {
  IntegralResult res;
  if (a == b) return res;
  std::priority_queue<Panel> heap;
  Panel first = eval_panel(f, a, b);
  heap.push(first);
  double total = first.value, total_err = first.error;
  long evals = kPanelEvals;
  while (true) {
    const double target = std::max(cfg.rel_tol * std::abs(total), cfg.abs_tol);
    if (total_err <= target) break;
    if (evals + 2 * kPanelEvals > cfg.max_evals) {
      res.converged = false;
      break;
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // panel cannot be split further
      heap.push(worst);
      res.converged = false;
      break;
    }
    Panel l = eval_panel(f, worst.a, mid), r = eval_panel(f, mid, worst.b);
    evals += 2 * kPanelEvals;
    total += l.value + r.value - worst.value;
    total_err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum from the panels to avoid drift from the running updates.
  std::vector<double> vals, errs;
  while (!heap.empty()) {
    vals.push_back(heap.top().value);
    errs.push_back(heap.top().error);
    heap.pop();
  }
  res.value = pairwise_sum(vals.data(), vals.size());
  res.error_estimate = pairwise_sum(errs.data(), errs.size());
  res.evals = evals;
  if (res.converged) res.converged = res.error_estimate <= std::max(cfg.rel_tol * std::abs(res.value.real()), cfg.abs_tol);
  return res;
}

IntegralResult integrate_1d_semi_infinite(const std::function<double(double)>& f, double a, const QuadConfig& cfg) {
  auto g = [&](double u) {
    if (u >= 1.0) return 0.0;
    const double om = 1.0 - u;
    return f(a + u / om) / (om * om);
  };
  return integrate_1d(g, 0.0, 1.0, cfg);
}

IntegralResult integrate_2d(const std::function<double(double, double)>& f, const Box2& box, const QuadConfig& cfg) {
  QuadConfig inner = cfg;
  inner.rel_tol = cfg.rel_tol * 0.1;
  inner.abs_tol = cfg.abs_tol * 0.1;
  long inner_evals = 0;
  bool inner_ok = true;
  double inner_err = 0.0;
  auto outer = [&](double x) {
    auto g = [&](double y) { return f(x, y); };
    IntegralResult r = integrate_1d(g, box.y0, box.y1, inner);
    inner_evals += r.evals;
    inner_ok = inner_ok && r.converged;
    inner_err = std::max(inner_err, r.error_estimate);
    return r.re();
  };
  IntegralResult res = integrate_1d(outer, box.x0, box.x1, cfg);
  res.evals = inner_evals;
  res.error_estimate += inner_err * std::abs(box.x1 - box.x0);
  res.converged = res.converged && inner_ok;
  return res;
}

double CounterRng::normal() {
  // Box-Muller; one draw per call keeps the stream layout simple.
  const double u1 = uniform(), u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec3 CounterRng::unit_vector() {
  const double z = 2.0 * uniform() - 1.0;
  const double ph = 2.0 * std::numbers::pi * uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(ph), s * std::sin(ph), z};
}

template <class T>
static T pairwise_impl(const T* x, size_t n) {
  if (n == 0) return T{};
  if (n <= 8) {
    T s = x[0];
    for (size_t i = 1; i < n; ++i) s += x[i];
    return s;
  }
  const size_t h = n / 2;
  return pairwise_impl(x, h) + pairwise_impl(x + h, n - h);
}

cplx pairwise_sum(const cplx* x, size_t n) { return pairwise_impl(x, n); }
double pairwise_sum(const double* x, size_t n) { return pairwise_impl(x, n); }

std::vector<IntegralResult> mc_integrate_multi(size_t nterms, const McMultiEstimator& estimator, const QuadConfig& cfg) {
  if (cfg.mc_samples <= 1) throw DomainError("Monte Carlo needs at least two samples");
  if (nterms == 0) return {};
  const size_t n = static_cast<size_t>(cfg.mc_samples);
  constexpr size_t kBlock = 1024;
  const size_t nblocks = (n + kBlock - 1) / kBlock;
  // Per block and term: sum and centered second moment.
  std::vector<cplx> sums(nblocks * nterms);
  std::vector<double> sq(nblocks * nterms);
  parallel_for(nblocks, cfg.threads, [&](size_t b) {
    const size_t lo = b * kBlock, hi = std::min(n, lo + kBlock), nb = hi - lo;
    std::vector<cplx> v(nb * nterms);
    for (size_t i = lo; i < hi; ++i) {
      CounterRng rng(cfg.seed, i);
      estimator(rng, i, &v[(i - lo) * nterms]);
    }
    std::vector<cplx> col(nb);
    for (size_t t = 0; t < nterms; ++t) {
      for (size_t i = 0; i < nb; ++i) col[i] = v[i * nterms + t];
      const cplx s = pairwise_sum(col.data(), nb);
      const cplx mean = s / static_cast<double>(nb);
      double acc = 0.0;
      for (const cplx& z : col) acc += std::norm(z - mean);
      sums[b * nterms + t] = s;
      sq[b * nterms + t] = acc;
    }
  });
  const double nd = static_cast<double>(n);
  std::vector<IntegralResult> out(nterms);
  std::vector<cplx> bs(nblocks);
  std::vector<double> bq(nblocks), between(nblocks);
  for (size_t t = 0; t < nterms; ++t) {
    for (size_t b = 0; b < nblocks; ++b) {
      bs[b] = sums[b * nterms + t];
      bq[b] = sq[b * nterms + t];
    }
    const cplx mean = pairwise_sum(bs.data(), nblocks) / nd;
    // Within-block scatter plus between-block scatter of block means.
    for (size_t b = 0; b < nblocks; ++b) {
      const size_t nb = std::min(n, (b + 1) * kBlock) - b * kBlock;
      between[b] = static_cast<double>(nb) * std::norm(bs[b] / static_cast<double>(nb) - mean);
    }
    const double ss = pairwise_sum(bq.data(), nblocks) + pairwise_sum(between.data(), nblocks);
    IntegralResult& r = out[t];
    r.value = mean;
    r.error_estimate = std::sqrt(ss / (nd - 1.0) / nd);
    r.evals = cfg.mc_samples;
    r.converged = r.error_estimate <= std::max(cfg.mc_rel_tol * std::abs(mean), cfg.abs_tol);
  }
  return out;
}

IntegralResult mc_integrate(const McEstimator& estimator, const QuadConfig& cfg) {
  return mc_integrate_multi(
      1, [&](CounterRng& rng, uint64_t i, cplx* out) { out[0] = estimator(rng, i); }, cfg)[0];
}

}  // namespace cb
