#include "confbaryo/baryo_rate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace cb {

namespace {

constexpr double kPi = std::numbers::pi;
const double kTwoPi4 = std::pow(2.0 * kPi, 4);
const double kTwoPi6 = std::pow(2.0 * kPi, 6);

// |q| ~ Gamma(3, L) with a uniform direction: density exp(-|q|/L) / (8 pi L^3).
Vec3 sample_q(CounterRng& rng, double L, double& inv_pq) {
  const double u = rng.uniform() * rng.uniform() * rng.uniform();
  const double rho = -L * std::log(u);
  inv_pq = 8.0 * kPi * L * L * L * std::exp(rho / L);
  return rho * rng.unit_vector();
}

// |r| uniform on [0, smax] with a uniform direction: density 1 / (4 pi |r|^2 smax).
Vec3 sample_r(CounterRng& rng, double smax, double& inv_pr) {
  const double s = smax * rng.uniform();
  inv_pr = 4.0 * kPi * s * s * smax;
  return s * rng.unit_vector();
}

cplx tr_prod(const Mat4& L, const Mat4& R) { return (L.transpose().cwiseProduct(R)).sum(); }

void fill_conventions(RateReport& rep, const RateOptions& o) { rep.convention = convention_record(o); }

}  // namespace

std::vector<std::pair<std::string, std::string>> convention_record(const RateOptions& o) {
  return {
      {"fourier_kernel", FourierConvention::kernel},
      {"fourier_normalization", FourierConvention::normalization},
      {"gamma_basis", "Dirac"},
      {"metric_signature", "(+,-,-,-)"},
      {"normalization", to_string(o.normalization)},
      {"normalization_factor", std::to_string(normalization_factor(o.normalization))},
      {"conjugation", to_string(o.conjugation)},
      {"t1_convention", to_string(o.t1_convention)},
      {"dynamics", to_string(o.dynamics)},
      {"band", "|(k+k')/2| <= sqrt(Lambda^2 - m^2), sharp window"},
  };
}

namespace {

RateReport base_report(const RateRequest& req, const std::string& scenario) {
  RateReport rep;
  rep.scenario = scenario;
  rep.eps = req.cutoffs.eps;
  rep.Lambda = req.cutoffs.Lambda;
  rep.m = req.cutoffs.m;
  rep.s_max = req.cutoffs.s_max();
  fill_conventions(rep, req.options);
  return rep;
}

RateReport exact_zero(RateReport rep, const std::string& reason) {
  rep.path = "exact_zero";
  rep.reason = reason;
  rep.B2 = 0.0;
  rep.B2_imag = 0.0;
  rep.error_estimate = 0.0;
  return rep;
}

double field_lambda(const RateRequest& req) { return req.field ? req.field->lambda : 0.0; }

bool profile_is_one(const ConformalProfile& p) { return p.family == "minkowski"; }

// Radius (about the origin) outside which Omega - 1 and its derivatives vanish.
double profile_radius(const ConformalProfile& p) {
  if (!p.compact_support_radius) throw DomainError("profile has no compact spatial support");
  return *p.compact_support_radius + (p.radial_center ? p.radial_center->norm() : 0.0);
}

struct RadialPair {
  RadialProfile a1, a2;
  double support = 0.0;
};

RadialPair scenario1_radial(const ConformalProfile& profile, double t) {
  const Vec3 c = *profile.radial_center;
  RadialPair rp;
  rp.support = *profile.compact_support_radius;
  rp.a1.support_radius = rp.support;
  rp.a2.support_radius = rp.support;
  rp.a1.f = [profile, t, c](double s) { return profile.jet(t, c + Vec3(0.0, 0.0, s)).dt; };
  rp.a2.f = [profile, t, c](double s) { return profile.jet(t, c + Vec3(0.0, 0.0, s)).delta; };
  return rp;
}

QuadConfig hat_cfg(const QuadConfig& q) {
  QuadConfig h = q;
  h.rel_tol = std::min(q.rel_tol, 1e-12);
  h.abs_tol = 0.0;
  return h;
}

// First rho beyond which rho^2 |a1hat a2hat| stays below tol * its maximum.
double rho_cutoff(const std::function<double(double)>& weight, double step, double tol, double cap, bool& all_zero) {
  double peak = 0.0, last_big = 0.0;
  int quiet = 0;
  for (double rho = step; rho <= cap; rho += step) {
    const double v = std::abs(weight(rho));
    if (v > peak) peak = v;
    if (v > tol * peak) {
      last_big = rho;
      quiet = 0;
    } else if (++quiet >= 8 && peak > 0.0) {
      break;
    }
  }
  all_zero = peak == 0.0;
  return std::max(last_big + 2.0 * step, 4.0 * step);
}

// True when f vanishes at every sample of [0, R]; lets an identically zero
// coefficient short-circuit before the transform scan.
bool radial_samples_zero(const RadialProfile& a, double R) {
  for (int i = 0; i <= 2000; ++i)
    if (a.f(R * i / 2000.0) != 0.0) return false;
  return true;
}

double scenario1_perturbation(const ConformalProfile& profile, double t, const Vec3& c, double R, double m) {
  double sup = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const ProfileJet j = profile.jet(t, c + Vec3(0.0, 0.0, R * i / 200.0));
    sup = std::max(sup, m * std::abs(j.delta) + std::abs(j.dt));
  }
  const double gap = m > 0.0 ? m : 1.0 / std::max(R, 1e-300);
  return sup / gap;
}

const Mat4& g0gi(int mu) {
  static const std::array<Mat4, 3> v = [] {
    const auto& g = dirac_gammas();
    return std::array<Mat4, 3>{g[0] * g[1], g[0] * g[2], g[0] * g[3]};
  }();
  return v[static_cast<size_t>(mu)];
}

// [gamma_mu, gamma_rho] for spatial pairs (12), (13), (23); lowering both
// indices leaves the commutator unchanged.
const Mat4& spatial_comm(int pair) {
  static const std::array<Mat4, 3> v = [] {
    const auto& g = dirac_gammas();
    return std::array<Mat4, 3>{commutator(g[1], g[2]), commutator(g[1], g[3]), commutator(g[2], g[3])};
  }();
  return v[static_cast<size_t>(pair)];
}

constexpr int kPairIdx[3][2] = {{0, 1}, {0, 2}, {1, 2}};

// Grid transforms are periodic in each component; beyond the Nyquist cube
// they are aliases, so the band-limited transform is zero there.
bool beyond_nyquist(const Vec3& q, double h) { return q.cwiseAbs().maxCoeff() > std::numbers::pi / h; }

GridField3 sample_grid(const std::function<double(const Vec3&)>& f, int n, double hw) {
  return GridField3::centered(f, n, hw);
}

}  // namespace

double normalization_factor(Normalization n) { return n == Normalization::theorem ? -0.25 : 1.0; }

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::scenario1: return "scenario1";
    case Scenario::scenario2: return "scenario2";
    case Scenario::mixed: return "mixed";
    case Scenario::generic: return "generic";
  }
  return "?";
}
std::string to_string(Normalization n) { return n == Normalization::theorem ? "theorem" : "derivation"; }
std::string to_string(Conjugation c) { return c == Conjugation::forward ? "forward" : "reverse"; }
std::string to_string(T1Convention c) { return c == T1Convention::exact ? "exact" : "three_quarters"; }
std::string to_string(Dynamics d) { return d == Dynamics::canonical ? "canonical" : "linearized"; }

LowerOrders b0_and_b1() {
  LowerOrders lo;
  lo.rationale =
      "orders 0 and 1 involve F_{-m}(x,x) and its first derivative at coincidence; the on-shell sphere "
      "radius sqrt(w^2 - m^2) vanishes at w = -m, so both are identically zero";
  return lo;
}

ChebyshevTable::ChebyshevTable(double a, double b, int n, const std::function<double(double)>& f) : a_(a), b_(b) {
  if (n < 2 || !(b > a)) throw DomainError("ChebyshevTable needs n >= 2 and b > a");
  x_.resize(static_cast<size_t>(n));
  f_.resize(static_cast<size_t>(n));
  w_.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double th = (2.0 * j + 1.0) * kPi / (2.0 * n);
    x_[static_cast<size_t>(j)] = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(th);
    w_[static_cast<size_t>(j)] = (j % 2 ? -1.0 : 1.0) * std::sin(th);
  }
  for (size_t j = 0; j < x_.size(); ++j) f_[j] = f(x_[j]);
}

double ChebyshevTable::operator()(double x) const {
  x = std::clamp(x, a_, b_);
  double num = 0.0, den = 0.0;
  for (size_t j = 0; j < x_.size(); ++j) {
    const double d = x - x_[j];
    if (d == 0.0) return f_[j];
    const double c = w_[j] / d;
    num += c * f_[j];
    den += c;
  }
  return num / den;
}

double ChebyshevTable::tail_estimate() const {
  const int n = static_cast<int>(x_.size());
  double fmax = 0.0;
  for (double v : f_) fmax = std::max(fmax, std::abs(v));
  if (fmax == 0.0) return 0.0;
  auto coeff = [&](int k) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += f_[static_cast<size_t>(j)] * std::cos(k * (2.0 * j + 1.0) * kPi / (2.0 * n));
    return 2.0 * s / n;
  };
  return (std::abs(coeff(n - 1)) + std::abs(coeff(n - 2))) / fmax;
}

KTable k_table(double rho_max, int nodes, const CutoffConfig& cut, const QuadConfig& quad) {
  // Nodes first (in parallel), then the interpolant from the stored values.
  std::vector<double> x(static_cast<size_t>(nodes));
  for (int j = 0; j < nodes; ++j)
    x[static_cast<size_t>(j)] = 0.5 * rho_max + 0.5 * rho_max * std::cos((2.0 * j + 1.0) * kPi / (2.0 * nodes));
  std::vector<IntegralResult> res(x.size());
  QuadConfig q = quad;
  q.threads = 1;
  parallel_for(x.size(), quad.threads, [&](size_t j) { res[j] = k_kernel(x[j], cut, q); });
  KTable kt;
  size_t idx = 0;
  kt.cheb = ChebyshevTable(0.0, rho_max, nodes, [&](double) { return res[idx++].re(); });
  for (const auto& r : res) {
    kt.max_error = std::max(kt.max_error, r.error_estimate);
    kt.evals += r.evals;
    if (!r.converged) throw DomainError("K(rho) quadrature did not converge");
  }
  return kt;
}

std::vector<IntegralResult> i_ab_multi(size_t nv, const VertexSource& source, const std::vector<VertexPair>& pairs,
                                       const CutoffConfig& cut, const QuadConfig& quad, int inner) {
  if (inner < 1) throw DomainError("inner sample count must be positive");
  const double smax = cut.s_max();
  const double L = quad.importance_scale;
  const double m = cut.m, eps = cut.eps;
  const size_t np = pairs.size();
  std::vector<char> first(nv, 0), second(nv, 0);
  for (const auto& p : pairs) {
    first[static_cast<size_t>(p.a)] = 1;
    second[static_cast<size_t>(p.b)] = 1;
  }
  auto est = [&](CounterRng& rng, uint64_t, cplx* out) {
    double inv_pq = 0.0;
    const Vec3 q = sample_q(rng, L, inv_pq);
    std::vector<VertexValue> aq(nv), amq(nv);
    source(q, aq, amq);
    std::vector<Mat4> Lp(nv), Lm(nv), Rp(nv), Rm(nv);
    std::vector<cplx> acc(np, cplx(0.0, 0.0));
    // Antithetic pairs r, -r cancel the parts of the integrand odd in r.
    for (int j = 0; j < inner; ++j) {
      double inv_pr = 0.0;
      const Vec3 r0 = sample_r(rng, smax, inv_pr);
      for (int sgn = 0; sgn < 2; ++sgn) {
        const Vec3 r = sgn ? Vec3(-r0) : r0;
        const Vec3 k = r + 0.5 * q, kp = r - 0.5 * q;
        const double w = omega_k(k, m), wp = omega_k(kp, m);
        const double den = 4.0 * w * wp * (w + wp) * (w + wp);
        // Gamma_+ : F(k') at -w', F(k) at +w.  Gamma_- : signs flipped.
        const Mat4 Fkp_p = f_hat_omega(kp, -wp, m, Branch::negative, eps);
        const Mat4 Fkp_m = f_hat_omega(kp, wp, m, Branch::positive, eps);
        const Mat4 Fk_p = f_hat_omega(k, w, m, Branch::positive, eps);
        const Mat4 Fk_m = f_hat_omega(k, -w, m, Branch::negative, eps);
        for (size_t v = 0; v < nv; ++v) {
          if (first[v]) {
            const Mat4 K = vertex_kernel(aq[v], k, kp);
            Lp[v] = K * Fkp_p;
            Lm[v] = K * Fkp_m;
          }
          if (second[v]) {
            const Mat4 K = vertex_kernel(amq[v], kp, k);
            Rp[v] = K * Fk_p;
            Rm[v] = K * Fk_m;
          }
        }
        const double wgt = 0.5 * inv_pr / den;
        for (size_t p = 0; p < np; ++p) {
          const auto a = static_cast<size_t>(pairs[p].a), b = static_cast<size_t>(pairs[p].b);
          acc[p] -= wgt * (tr_prod(Lp[a], Rp[b]) + tr_prod(Lm[a], Rm[b]));
        }
      }
    }
    const double scale = inv_pq / (static_cast<double>(inner) * kTwoPi6);
    cplx total(0.0, 0.0);
    for (size_t p = 0; p < np; ++p) {
      out[p] = acc[p] * scale;
      total += out[p];
    }
    out[np] = total;
  };
  return mc_integrate_multi(np + 1, est, quad);
}

IntegralResult i_ab(const Vertex& A, const Vertex& B, const CutoffConfig& cut, const QuadConfig& quad, int inner) {
  VertexSource src = [&](const Vec3& q, std::vector<VertexValue>& aq, std::vector<VertexValue>& amq) {
    aq[0] = A.at(q);
    amq[1] = B.at(-q);
  };
  return i_ab_multi(2, src, {{0, 1, "I_AB"}}, cut, quad, inner)[0];
}

IntegralResult i_ab_gamma0_radial(const RadialProfile& a1, const RadialProfile& a2, const CutoffConfig& cut,
                                  const QuadConfig& quad, int k_nodes) {
  const QuadConfig hq = hat_cfg(quad);
  auto weight = [&](double rho) { return rho * rho * radial_hat(a1, rho, hq).re() * radial_hat(a2, rho, hq).re(); };
  bool zero = false;
  const double R = std::max(a1.support_radius, a2.support_radius);
  const double rho_max = rho_cutoff(weight, 0.25 / std::max(R / 5.0, 0.2), 1e-3 * quad.rel_tol, 400.0, zero);
  IntegralResult out;
  if (zero) return out;
  const KTable kt = k_table(rho_max, k_nodes, cut, quad);
  out = integrate_1d([&](double rho) { return -2.0 * weight(rho) * kt.cheb(rho) / kTwoPi4; }, 0.0, rho_max, quad);
  double kmax = 0.0;
  for (double v : kt.cheb.values()) kmax = std::max(kmax, std::abs(v));
  out.error_estimate += std::abs(out.value) * (kt.max_error / std::max(kmax, 1e-300) + kt.cheb.tail_estimate());
  return out;
}

RateReport rate_generic(const GFactory& G, const CutoffConfig& cut, const QuadConfig& quad, int inner) {
  if (inner < 1) throw DomainError("inner sample count must be positive");
  const double smax = cut.s_max();
  const double L = quad.importance_scale;
  const double m = cut.m, eps = cut.eps;
  auto est = [&](CounterRng& rng, uint64_t) {
    double inv_pq = 0.0;
    const Vec3 q = sample_q(rng, L, inv_pq);
    const GFunction g = G(q);
    double acc = 0.0;
    for (int j = 0; j < inner; ++j) {
      double inv_pr = 0.0;
      const Vec3 r0 = sample_r(rng, smax, inv_pr);
      for (int sgn = 0; sgn < 2; ++sgn) {
        const Vec3 r = sgn ? Vec3(-r0) : r0;
        const Vec3 k = r + 0.5 * q, kp = r - 0.5 * q;
        const double w = omega_k(k, m), wp = omega_k(kp, m);
        if (!(1.0 - eps * w > 0.0) || !(1.0 - eps * wp > 0.0)) continue;
        acc -= 0.5 * g(k, kp) * inv_pr / (4.0 * w * wp * (w + wp) * (w + wp));
      }
    }
    return cplx(acc * inv_pq / (static_cast<double>(inner) * kTwoPi6), 0.0);
  };
  const IntegralResult res = mc_integrate(est, quad);
  RateReport rep;
  rep.scenario = "generic";
  rep.path = "generic_mc";
  rep.B2 = res.re();
  rep.B2_imag = res.im();
  rep.error_estimate = res.error_estimate;
  rep.converged = res.converged;
  rep.evals = res.evals * inner;
  rep.eps = cut.eps;
  rep.Lambda = cut.Lambda;
  rep.m = cut.m;
  rep.s_max = smax;
  fill_conventions(rep, RateOptions{});
  return rep;
}

RateReport rate_generic(const GFunction& G, const CutoffConfig& cut, const QuadConfig& quad, int inner) {
  return rate_generic(GFactory([&G](const Vec3&) { return G; }), cut, quad, inner);
}

GFunction scenario1_G(const HatFunction& a1, const HatFunction& a2, double m, Normalization n) {
  const double pref = n == Normalization::theorem ? 2.0 * m * m : -8.0 * m * m;
  return [a1, a2, m, pref](const Vec3& k, const Vec3& kp) {
    const Vec3 q = k - kp;
    const double P = 2.0 * std::real(a1(q) * std::conj(a2(q)));
    if (P == 0.0) return 0.0;
    const double w = omega_k(k, m), wp = omega_k(kp, m);
    return pref * (-w * wp + m * m - k.dot(kp)) * P;
  };
}

std::array<double, kScenario2Fields> scenario2_fields(const ConformalProfile& profile, double t, const Vec3& x,
                                                     const FieldJet& F, Dynamics dyn) {
  std::array<double, kScenario2Fields> o{};
  const OmegaLogJet w = omega_log_jet(profile.jet(t, x));
  const FieldRates R = field_rates(F, dyn);
  auto fill = [&](int off, double f, const Vec3& X, const Vec3& fw, double Xw, const std::array<double, 3>& A) {
    o[static_cast<size_t>(off)] = f;
    for (int i = 0; i < 3; ++i) {
      o[static_cast<size_t>(off + 1 + i)] = X[i];
      o[static_cast<size_t>(off + 4 + i)] = fw[i];
      o[static_cast<size_t>(off + 8 + i)] = A[static_cast<size_t>(i)];
    }
    o[static_cast<size_t>(off + 7)] = Xw;
  };
  std::array<double, 3> Ay{}, Az{};
  for (int p = 0; p < 3; ++p) {
    const int a = kPairIdx[p][0], b = kPairIdx[p][1];
    Ay[static_cast<size_t>(p)] = F.X[a] * w.w[b] - F.X[b] * w.w[a];
    Az[static_cast<size_t>(p)] =
        R.Xdot[a] * w.w[b] + F.X[a] * w.wdot[b] - R.Xdot[b] * w.w[a] - F.X[b] * w.wdot[a];
  }
  fill(0, F.f, F.X, F.f * w.w, F.X.dot(w.w), Ay);
  fill(11, R.fdot, R.Xdot, R.fdot * w.w + F.f * w.wdot, R.Xdot.dot(w.w) + F.X.dot(w.wdot), Az);
  return o;
}

WeylDensity scenario2_weyl_density(const std::array<double, kScenario2Fields>& fl, int which, double s) {
  const size_t off = which == 0 ? 0 : 11;
  WeylDensity d;
  const Mat4 Id = Mat4::Identity();
  const double c = s + 1.5;
  for (int mu = 0; mu < 3; ++mu) {
    const auto m = static_cast<size_t>(mu);
    d.a[m] = (-I * fl[off]) * g0gi(mu) + (I * fl[off + 1 + m]) * Id;
    d.h += (-I * c * fl[off + 4 + m]) * g0gi(mu);
    d.h += (-0.25 * I * fl[off + 8 + m]) * spatial_comm(mu);
  }
  d.h += (I * c * fl[off + 7]) * Id;
  return d;
}

std::array<VertexValue, 4> scenario2_vertices(const cplx* h, double s) {
  std::array<VertexValue, 4> v;
  const Mat4 Id = Mat4::Identity();
  for (int which = 0; which < 2; ++which) {
    const int off = which == 0 ? 0 : 11;
    VertexValue& T = v[static_cast<size_t>(2 * which)];
    VertexValue& L = v[static_cast<size_t>(2 * which + 1)];
    L.first_order = true;
    L.weyl = true;
    Mat4 fw = Mat4::Zero();
    for (int mu = 0; mu < 3; ++mu) {
      const auto m = static_cast<size_t>(mu);
      L.a[m] = (-I * h[off]) * g0gi(mu) + (I * h[off + 1 + mu]) * Id;
      fw += h[off + 4 + mu] * g0gi(mu);
      L.b += (-0.25 * I * h[off + 8 + mu]) * spatial_comm(mu);
    }
    // omega_mu c^mu = -i (f omega)_mu gamma^0 gamma^mu + i (X.omega)
    const Mat4 wc = -I * fw + (I * h[off + 7]) * Id;
    T.b = s * wc;
    L.b += 1.5 * wc;
  }
  return v;
}

RateReport rate_scenario1(const RateRequest& req) {
  const CutoffConfig& cut = req.cutoffs;
  cut.validate();
  RateReport rep = base_report(req, "scenario1");
  if (field_lambda(req) != 0.0) throw DomainError("scenario1 requires the field to be absent or lambda = 0");
  const ConformalProfile& P = req.profile;
  const double m = cut.m;
  if (profile_is_one(P) || (P.spatially_homogeneous && m == 0.0)) return exact_zero(rep, "ΔA=0");
  if (m == 0.0) return exact_zero(rep, "m=0");
  if (P.spatially_homogeneous)
    throw DomainError("scenario1 with m > 0 needs a compactly supported perturbation; Omega(t) is not");
  if (!P.compact_support_radius) throw DomainError("scenario1 needs a compactly supported profile");
  const double N = normalization_factor(req.options.normalization);
  const QuadConfig& quad = req.quad;

  if (P.radial_center && !req.options.scenario1_force_generic) {
    rep.path = "reduced_1d";
    const RadialPair rp = scenario1_radial(P, req.t);
    if (radial_samples_zero(rp.a1, rp.support) || radial_samples_zero(rp.a2, rp.support))
      return exact_zero(rep, "alpha1_hat*alpha2_hat=0");
    const QuadConfig hq = hat_cfg(quad);
    auto hats = [&](double rho) {
      return std::pair<double, double>{radial_hat(rp.a1, rho, hq).re(), radial_hat(rp.a2, rho, hq).re()};
    };
    auto weight = [&](double rho) {
      const auto [h1, h2] = hats(rho);
      return rho * rho * 2.0 * h1 * h2;
    };
    bool zero = false;
    const double step = 0.25 / std::max(rp.support / 5.0, 0.2);
    rep.rho_max = rho_cutoff(weight, step, 1e-3 * quad.rel_tol, 400.0, zero);
    rep.perturbation_scale = scenario1_perturbation(P, req.t, *P.radial_center, rp.support, m);
    rep.alpha_table.columns = {"rho[1/length]", "alpha1_hat[1/time]", "alpha2_hat[1]"};
    for (int i = 0; i <= 64; ++i) {
      const double rho = rep.rho_max * i / 64.0;
      const auto [h1, h2] = hats(rho);
      rep.alpha_table.rows.push_back({rho, h1, h2});
    }
    if (zero) return exact_zero(rep, "alpha1_hat*alpha2_hat=0");
    const KTable kt = k_table(rep.rho_max, req.options.k_table_nodes, cut, quad);
    rep.k_table.columns = {"rho[1/length]", "K[length^-1]"};
    const auto& xs = kt.cheb.nodes();
    for (size_t j = xs.size(); j-- > 0;) rep.k_table.rows.push_back({xs[j], kt.cheb.values()[j]});
    // B2 = N * 2 m^2 int rho^2 P K / (2pi)^4, P = 2 a1hat a2hat (both real).
    const IntegralResult I1 = integrate_1d(
        [&](double rho) { return N * 2.0 * m * m * weight(rho) * kt.cheb(rho) / kTwoPi4; }, 0.0, rep.rho_max, quad);
    double kmax = 0.0;
    for (double v : kt.cheb.values()) kmax = std::max(kmax, std::abs(v));
    rep.B2 = I1.re();
    rep.B2_imag = I1.im();
    rep.error_estimate =
        I1.error_estimate + std::abs(rep.B2) * (kt.max_error / std::max(kmax, 1e-300) + kt.cheb.tail_estimate());
    rep.converged = I1.converged;
    rep.evals = I1.evals + kt.evals;
    const double Isum = rep.B2 / (-N * m * m);
    rep.terms = {{"I_12+I_21", Isum, 0.0, rep.error_estimate / std::abs(N * m * m)}};
    return rep;
  }

  // Generic path: G from hat tables (radial) or grid transforms.
  GFactory G;
  std::shared_ptr<GridField3> g1, g2;
  std::shared_ptr<ChebyshevTable> t1, t2;
  double rho_tab = 0.0;
  if (P.radial_center) {
    const RadialPair rp = scenario1_radial(P, req.t);
    if (radial_samples_zero(rp.a1, rp.support) || radial_samples_zero(rp.a2, rp.support))
      return exact_zero(rep, "alpha1_hat*alpha2_hat=0");
    const QuadConfig hq = hat_cfg(quad);
    bool zero = false;
    rho_tab = rho_cutoff(
        [&](double rho) { return rho * rho * radial_hat(rp.a1, rho, hq).re() * radial_hat(rp.a2, rho, hq).re(); },
        0.25 / std::max(rp.support / 5.0, 0.2), 1e-3 * quad.rel_tol, 400.0, zero);
    if (zero) return exact_zero(rep, "alpha1_hat*alpha2_hat=0");
    t1 = std::make_shared<ChebyshevTable>(0.0, rho_tab, 96, [&](double r) { return radial_hat(rp.a1, r, hq).re(); });
    t2 = std::make_shared<ChebyshevTable>(0.0, rho_tab, 96, [&](double r) { return radial_hat(rp.a2, r, hq).re(); });
    const Vec3 c = *P.radial_center;
    auto hat = [c, rho_tab](std::shared_ptr<ChebyshevTable> t) {
      // A shift of the center multiplies both hats by the same phase.
      return HatFunction([t, c, rho_tab](const Vec3& q) {
        const double r = q.norm();
        return r > rho_tab ? cplx(0.0, 0.0) : std::polar((*t)(r), -q.dot(c));
      });
    };
    const GFunction g = scenario1_G(hat(t1), hat(t2), m, req.options.normalization);
    G = [g](const Vec3&) { return g; };
    rep.perturbation_scale = scenario1_perturbation(P, req.t, c, *P.compact_support_radius, m);
  } else {
    const double hw = req.options.grid_half_width > 0.0 ? req.options.grid_half_width : profile_radius(P);
    const int n = req.options.grid_n;
    const double t = req.t;
    g1 = std::make_shared<GridField3>(sample_grid([&](const Vec3& x) { return P.jet(t, x).dt; }, n, hw));
    g2 = std::make_shared<GridField3>(sample_grid([&](const Vec3& x) { return P.jet(t, x).delta; }, n, hw));
    check_grid_support(*g1);
    check_grid_support(*g2);
    rho_tab = kPi / g1->h;
    double sup = 0.0;
    for (size_t i = 0; i < g1->values.size(); ++i) sup = std::max(sup, m * std::abs(g2->values[i]) + std::abs(g1->values[i]));
    rep.perturbation_scale = sup / m;
    const Normalization nz = req.options.normalization;
    G = [g1, g2, m, nz](const Vec3& q) {
      cplx h[2] = {0.0, 0.0};
      if (!beyond_nyquist(q, g1->h)) field_hats_3d({g1.get(), g2.get()}, q, h, false);
      const cplx a = h[0], b = h[1];
      return scenario1_G([a](const Vec3&) { return a; }, [b](const Vec3&) { return b; }, m, nz);
    };
  }
  RateReport g = rate_generic(G, cut, quad, req.options.inner_samples);
  rep.path = "generic_mc";
  rep.rho_max = rho_tab;
  rep.B2 = g.B2;
  rep.B2_imag = g.B2_imag;
  rep.error_estimate = g.error_estimate;
  rep.converged = g.converged;
  rep.evals = g.evals;
  if (t1) {
    rep.alpha_table.columns = {"rho[1/length]", "alpha1_hat[1/time]", "alpha2_hat[1]"};
    for (int i = 0; i <= 64; ++i) {
      const double rho = rho_tab * i / 64.0;
      rep.alpha_table.rows.push_back({rho, (*t1)(rho), (*t2)(rho)});
    }
  }
  return rep;
}

namespace {

struct GridSet {
  std::vector<GridField3> grids;
  std::vector<const GridField3*> ptrs;
};

// The 22 scenario-2 fields (plus delta and d_t Omega when `mixed`) on one grid.
GridSet scenario2_grids(const RateRequest& req, double hw, bool mixed) {
  const int n = req.options.grid_n;
  const size_t nf = kScenario2Fields + (mixed ? 2 : 0);
  GridSet gs;
  gs.grids.resize(nf);
  const GridField3 proto = GridField3::centered([](const Vec3&) { return 0.0; }, n, hw);
  for (auto& g : gs.grids) g = proto;
  const SliceField& F = *req.field;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 x = proto.point(i, j, k);
        const auto v = scenario2_fields(req.profile, req.t, x, F.jet(x), req.options.dynamics);
        for (size_t f = 0; f < v.size(); ++f) gs.grids[f].at(i, j, k) = v[f];
        if (mixed) {
          const ProfileJet pj = req.profile.jet(req.t, x);
          gs.grids[kScenario2Fields].at(i, j, k) = pj.delta;
          gs.grids[kScenario2Fields + 1].at(i, j, k) = pj.dt;
        }
      }
  for (const auto& g : gs.grids) {
    check_grid_support(g);
    gs.ptrs.push_back(&g);
  }
  return gs;
}

double field_radius(const SliceField& F) {
  if (!F.support_radius) throw DomainError("scenario2 needs compactly supported f and X");
  return *F.support_radius;
}

double scenario2_sup(const RateRequest& req, const GridField3& proto) {
  double sup = 0.0;
  const int n = proto.n;
  for (int k = 0; k < n; k += 2)
    for (int j = 0; j < n; j += 2)
      for (int i = 0; i < n; i += 2) {
        const Vec3 x = proto.point(i, j, k);
        sup = std::max(sup, scenario2_alpha_coeffs(req.profile, req.t, x, req.field->jet(x)).max_abs());
      }
  return sup;
}

void hats_table(RateReport& rep, const GridSet& gs) {
  rep.alpha_table.columns = {"rho[1/length]", "re_f_hat[1]", "im_f_hat[1]", "re_Xz_hat[1]", "im_Xz_hat[1]"};
  const double rmax = kPi / gs.grids.front().h;
  for (int i = 0; i <= 32; ++i) {
    const double rho = rmax * i / 32.0;
    cplx h[4];
    field_hats_3d({gs.ptrs[0], gs.ptrs[3]}, Vec3(0.0, 0.0, rho), h, false);
    rep.alpha_table.rows.push_back({rho, h[0].real(), h[0].imag(), h[1].real(), h[1].imag()});
  }
}

}  // namespace

RateReport rate_scenario2(const RateRequest& req) {
  const CutoffConfig& cut = req.cutoffs;
  cut.validate();
  RateReport rep = base_report(req, "scenario2");
  if (cut.m != 0.0) throw DomainError("scenario2 requires m = 0 (use mixed for m > 0)");
  const double lam = field_lambda(req);
  if (lam < 0.0) throw DomainError("scenario2 requires lambda >= 0");
  if (lam == 0.0) return exact_zero(rep, "ΔA=0");
  const SliceField& F = *req.field;
  if (F.identically_zero) return exact_zero(rep, "f=0, X=0");
  const double hw = req.options.grid_half_width > 0.0 ? req.options.grid_half_width : field_radius(F);
  const GridSet gs = scenario2_grids(req, hw, false);
  rep.rho_max = kPi / gs.grids.front().h;
  rep.perturbation_scale = lam * scenario2_sup(req, gs.grids.front()) * hw;
  hats_table(rep, gs);
  const double s = conjugation_factor(req.options.conjugation, req.options.t1_convention);
  const double hgrid = gs.grids.front().h;
  VertexSource src = [&](const Vec3& q, std::vector<VertexValue>& aq, std::vector<VertexValue>& amq) {
    if (beyond_nyquist(q, hgrid)) return;
    std::array<cplx, kScenario2Fields> h{}, hm{};
    field_hats_3d(gs.ptrs, q, h.data(), false);
    for (size_t i = 0; i < h.size(); ++i) hm[i] = std::conj(h[i]);
    const auto vq = scenario2_vertices(h.data(), s);
    const auto vm = scenario2_vertices(hm.data(), s);
    for (size_t i = 0; i < 4; ++i) {
      aq[i] = vq[i];
      amq[i] = vm[i];
    }
  };
  // T1 = 0, L1 = 1, T2 = 2, L2 = 3.
  const std::vector<VertexPair> pairs = {{2, 0, "I_T2T1"}, {2, 1, "I_T2L1"}, {3, 0, "I_L2T1"}, {3, 1, "I_L2L1"},
                                         {0, 2, "I_T1T2"}, {1, 2, "I_L1T2"}, {0, 3, "I_T1L2"}, {1, 3, "I_L1L2"}};
  const auto res = i_ab_multi(4, src, pairs, cut, req.quad, req.options.inner_samples);
  const double pref = normalization_factor(req.options.normalization) * -(lam * lam);
  for (size_t p = 0; p < pairs.size(); ++p)
    rep.terms.push_back({pairs[p].name, res[p].re(), res[p].im(), res[p].error_estimate});
  const IntegralResult& tot = res.back();
  rep.path = "vertex_mc";
  rep.B2 = pref * tot.re();
  rep.B2_imag = pref * tot.im();
  rep.error_estimate = std::abs(pref) * tot.error_estimate;
  rep.converged = tot.converged;
  rep.evals = tot.evals * req.options.inner_samples;
  return rep;
}

RateReport rate_mixed(const RateRequest& req) {
  const CutoffConfig& cut = req.cutoffs;
  cut.validate();
  RateReport rep = base_report(req, "mixed");
  const double lam = field_lambda(req), m = cut.m;
  if (lam < 0.0) throw DomainError("mixed requires lambda >= 0");
  const double N = normalization_factor(req.options.normalization);

  RateRequest r1 = req;
  r1.field.reset();
  const RateReport s1 = rate_scenario1(r1);
  RateReport s2;
  RateReport cross;
  if (lam != 0.0) {
    RateRequest r2 = req;
    r2.cutoffs.m = 0.0;
    s2 = rate_scenario2(r2);
  }
  std::vector<TermValue> cross_terms;
  double cross_B = 0.0, cross_im = 0.0, cross_err = 0.0;
  bool cross_conv = true;
  long cross_evals = 0;
  const bool cross_zero = lam == 0.0 || m == 0.0 || profile_is_one(req.profile) || req.field->identically_zero;
  if (!cross_zero) {
    const SliceField& F = *req.field;
    double hw = req.options.grid_half_width;
    if (!(hw > 0.0)) {
      if (req.profile.spatially_homogeneous)
        throw DomainError("mixed with m > 0 needs a compactly supported Omega - 1");
      hw = std::max(field_radius(F), profile_radius(req.profile));
    }
    const GridSet gs = scenario2_grids(req, hw, true);
    const double s = conjugation_factor(req.options.conjugation, req.options.t1_convention);
    const Mat4 g0 = dirac_gammas()[0];
    const double hgrid = gs.grids.front().h;
    VertexSource src = [&](const Vec3& q, std::vector<VertexValue>& aq, std::vector<VertexValue>& amq) {
      if (beyond_nyquist(q, hgrid)) return;
      std::array<cplx, kScenario2Fields + 2> h{}, hm{};
      field_hats_3d(gs.ptrs, q, h.data(), false);
      for (size_t i = 0; i < h.size(); ++i) hm[i] = std::conj(h[i]);
      const auto vq = scenario2_vertices(h.data(), s);
      const auto vm = scenario2_vertices(hm.data(), s);
      for (size_t i = 0; i < 4; ++i) {
        aq[i] = vq[i];
        amq[i] = vm[i];
      }
      // T3 = (Omega - 1) gamma^0, T4 = d_t Omega gamma^0
      aq[4].b = h[kScenario2Fields] * g0;
      amq[4].b = hm[kScenario2Fields] * g0;
      aq[5].b = h[kScenario2Fields + 1] * g0;
      amq[5].b = hm[kScenario2Fields + 1] * g0;
    };
    const std::vector<VertexPair> pairs = {{5, 0, "I_T4T1"}, {5, 1, "I_T4L1"}, {0, 5, "I_T1T4"}, {1, 5, "I_L1T4"},
                                           {2, 4, "I_T2T3"}, {3, 4, "I_L2T3"}, {4, 2, "I_T3T2"}, {4, 3, "I_T3L2"}};
    const auto res = i_ab_multi(6, src, pairs, cut, req.quad, req.options.inner_samples);
    const double pref = N * -(m * lam);
    for (size_t p = 0; p < pairs.size(); ++p)
      cross_terms.push_back({pairs[p].name, res[p].re(), res[p].im(), res[p].error_estimate});
    cross_B = pref * res.back().re();
    cross_im = pref * res.back().im();
    cross_err = std::abs(pref) * res.back().error_estimate;
    cross_conv = res.back().converged;
    cross_evals = res.back().evals * req.options.inner_samples;
  }
  rep.path = "composite";
  rep.B2 = s1.B2 + s2.B2 + cross_B;
  rep.B2_imag = s1.B2_imag + s2.B2_imag + cross_im;
  rep.error_estimate = std::sqrt(s1.error_estimate * s1.error_estimate + s2.error_estimate * s2.error_estimate +
                                 cross_err * cross_err);
  rep.converged = s1.converged && s2.converged && cross_conv;
  rep.evals = s1.evals + s2.evals + cross_evals;
  rep.rho_max = std::max(s1.rho_max, s2.rho_max);
  rep.perturbation_scale = s1.perturbation_scale + s2.perturbation_scale;
  rep.alpha_table = s1.alpha_table;
  rep.k_table = s1.k_table;
  rep.terms.push_back({"B2_scenario1", s1.B2, s1.B2_imag, s1.error_estimate});
  rep.terms.push_back({"B2_scenario2", s2.B2, s2.B2_imag, s2.error_estimate});
  rep.terms.push_back({"B2_cross", cross_B, cross_im, cross_err});
  for (const auto& t : s2.terms) rep.terms.push_back({"scenario2:" + t.name, t.re, t.im, t.error});
  for (const auto& t : cross_terms) rep.terms.push_back({"cross:" + t.name, t.re, t.im, t.error});
  if (rep.B2 == 0.0 && s1.path == "exact_zero" && (lam == 0.0 || s2.path == "exact_zero") && cross_zero)
    rep.reason = s1.reason;
  return rep;
}

RateReport compute_rate(const RateRequest& req) {
  switch (req.scenario) {
    case Scenario::scenario1: return rate_scenario1(req);
    case Scenario::scenario2: return rate_scenario2(req);
    case Scenario::mixed: return rate_mixed(req);
    case Scenario::generic: {
      if (!req.G) throw DomainError("generic scenario needs G");
      req.cutoffs.validate();
      RateReport r = rate_generic(req.G, req.cutoffs, req.quad, req.options.inner_samples);
      fill_conventions(r, req.options);
      return r;
    }
  }
  throw DomainError("unknown scenario");
}

}  // namespace cb
