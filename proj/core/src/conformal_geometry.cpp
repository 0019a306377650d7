#include "confbaryo/conformal_geometry.hpp"

#include <cmath>

#include "confbaryo/quadrature.hpp"

namespace cb {

namespace {

void check_point(const SphericalPoint& p) {
  if (!(p.r > 0.0)) throw DomainError("spherical point needs r > 0");
  if (std::abs(std::sin(p.theta)) < 1e-12) throw DomainError("spherical point too close to the polar axis");
}

// (d_t, d_r, d_theta, d_phi) Omega / Omega and Omega itself.
std::array<double, 4> log_partials(const ConformalProfile& profile, double t, const SphericalPoint& p, double& omega) {
  omega = profile.omega(t, spherical_to_cartesian(p));
  if (!(omega > 0.0)) throw DomainError("conformal factor must be positive");
  auto d = profile.spherical_partials(t, p);
  for (auto& v : d) v /= omega;
  return d;
}

void set_sym(ChristoffelTable& T, int i, int j, int k, double v) {
  T.G[i][j][k] = v;
  T.G[i][k][j] = v;
}

// Minkowski metric diagonal in spherical coordinates (lower indices).
std::array<double, 4> eta_lower(const SphericalPoint& p) {
  const double s = std::sin(p.theta);
  return {1.0, -1.0, -p.r * p.r, -p.r * p.r * s * s};
}

}  // namespace

double ChristoffelTable::max_abs() const {
  double m = 0.0;
  for (auto& a : G)
    for (auto& b : a)
      for (double v : b) m = std::max(m, std::abs(v));
  return m;
}

ChristoffelTable christoffel(const ConformalProfile& profile, double t, const SphericalPoint& p) {
  check_point(p);
  double Om;
  const auto w = log_partials(profile, t, p, Om);
  const double wt = w[0], wr = w[1], wth = w[2], wph = w[3];
  const double r = p.r, s = std::sin(p.theta), c = std::cos(p.theta);
  enum { T = 0, R = 1, TH = 2, PH = 3 };
  ChristoffelTable G;
  G.G[T][T][T] = wt;
  G.G[T][R][R] = wt;
  set_sym(G, R, T, R, wt);
  set_sym(G, TH, T, TH, wt);
  set_sym(G, PH, T, PH, wt);
  G.G[T][TH][TH] = r * r * wt;
  G.G[T][PH][PH] = r * r * s * s * wt;
  set_sym(G, T, R, T, wr);
  G.G[R][T][T] = wr;
  G.G[R][R][R] = wr;
  G.G[R][TH][TH] = -r - r * r * wr;
  G.G[R][PH][PH] = -s * s * (r + r * r * wr);
  G.G[TH][PH][PH] = -s * c - s * s * wth;
  set_sym(G, TH, R, TH, 1.0 / r + wr);
  set_sym(G, PH, R, PH, 1.0 / r + wr);
  set_sym(G, PH, TH, PH, c / s + wth);
  set_sym(G, T, T, TH, wth);
  set_sym(G, R, R, TH, wth);
  G.G[TH][TH][TH] = wth;
  set_sym(G, T, T, PH, wph);
  set_sym(G, R, R, PH, wph);
  set_sym(G, TH, TH, PH, wph);
  G.G[PH][PH][PH] = wph;
  G.G[TH][T][T] = wth / (r * r);
  G.G[TH][R][R] = -wth / (r * r);
  G.G[PH][TH][TH] = -wph / (s * s);
  G.G[PH][T][T] = wph / (r * r * s * s);
  G.G[PH][R][R] = -wph / (r * r * s * s);
  return G;
}

ChristoffelTable christoffel_fd(const ConformalProfile& profile, double t, const SphericalPoint& p, double h) {
  check_point(p);
  auto metric = [&](const std::array<double, 4>& u) {
    const SphericalPoint q{u[1], u[2], u[3]};
    const double Om = profile.omega(u[0], spherical_to_cartesian(q));
    auto e = eta_lower(q);
    for (auto& v : e) v *= Om * Om;
    return e;
  };
  const std::array<double, 4> u0{t, p.r, p.theta, p.phi};
  double dg[4][4] = {};  // dg[l][a] = d_l g_aa
  for (int l = 0; l < 4; ++l) {
    auto up = u0, um = u0;
    up[static_cast<size_t>(l)] += h;
    um[static_cast<size_t>(l)] -= h;
    const auto gp = metric(up), gm = metric(um);
    for (int a = 0; a < 4; ++a) dg[l][a] = (gp[static_cast<size_t>(a)] - gm[static_cast<size_t>(a)]) / (2.0 * h);
  }
  const auto g0 = metric(u0);
  ChristoffelTable G;
  // Diagonal metric: Gamma^i_{jk} = 1/(2 g_ii) (d_j g_ik + d_k g_ij - d_i g_jk).
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        double v = 0.0;
        if (i == k) v += dg[j][i];
        if (i == j) v += dg[k][i];
        if (j == k) v -= dg[i][j];
        G.G[i][j][k] = v / (2.0 * g0[static_cast<size_t>(i)]);
      }
  return G;
}

GammaDerivativeTable gamma_derivative_coefficients(const ConformalProfile& profile, double t, const SphericalPoint& p) {
  check_point(p);
  double Om;
  const auto w = log_partials(profile, t, p, Om);
  const double r = p.r, s = std::sin(p.theta), c = std::cos(p.theta);
  enum { T = 0, R = 1, TH = 2, PH = 3 };
  GammaDerivativeTable h;
  auto& H = h.H;
  // Every gamma_g^n picks up -(d_j Omega / Omega) gamma_g^n.
  for (int n = 0; n < 4; ++n)
    for (int j = 0; j < 4; ++j) H[n][j][n] = -w[static_cast<size_t>(j)];
  H[TH][R][TH] += -1.0 / r;
  H[PH][R][PH] += -1.0 / r;
  H[TH][TH][R] += -1.0 / r;
  H[PH][PH][R] += -1.0 / r;
  H[R][TH][TH] += r;
  H[TH][PH][PH] += s * c;
  H[PH][PH][TH] += -c / s;
  H[R][PH][PH] += r * s * s;
  H[PH][TH][PH] += -c / s;
  return h;
}

std::array<Mat4, 4> spin_connection_corrections(const ConformalProfile& profile, double t, const SphericalPoint& p) {
  check_point(p);
  double Om;
  const auto w = log_partials(profile, t, p, Om);
  const auto& basis = dirac_gammas();
  const auto gg = conformal_gammas(basis, p, Om);
  const auto el = eta_lower(p);
  std::array<Mat4, 4> S;
  for (int mu = 0; mu < 4; ++mu) {
    Mat4 inner = Mat4::Zero();
    for (int nu = 0; nu < 4; ++nu)
      if (nu != mu) inner += w[static_cast<size_t>(nu)] * gg[static_cast<size_t>(nu)];
    const Mat4 lowered = (Om * Om * el[static_cast<size_t>(mu)]) * gg[static_cast<size_t>(mu)];
    S[static_cast<size_t>(mu)] = 0.5 * lowered * inner;
  }
  return S;
}

std::array<Mat4, 4> spin_connection_general(const ConformalProfile& profile, double t, const SphericalPoint& p) {
  const auto G = christoffel(profile, t, p);
  const auto h = gamma_derivative_coefficients(profile, t, p);
  const double Om = profile.omega(t, spherical_to_cartesian(p));
  const auto gg = conformal_gammas(dirac_gammas(), p, Om);
  const auto el = eta_lower(p);
  std::array<Mat4, 4> low;
  for (int n = 0; n < 4; ++n) low[static_cast<size_t>(n)] = (Om * Om * el[static_cast<size_t>(n)]) * gg[static_cast<size_t>(n)];
  std::array<Mat4, 4> S;
  for (int j = 0; j < 4; ++j) {
    Mat4 acc = Mat4::Zero();
    for (int n = 0; n < 4; ++n)
      for (int k = 0; k < 4; ++k) {
        const double coef = h.H[n][j][k] + G.G[n][j][k];
        if (coef != 0.0) acc += coef * (gg[static_cast<size_t>(k)] * low[static_cast<size_t>(n)]);
      }
    S[static_cast<size_t>(j)] = -0.25 * acc;
  }
  return S;
}

double OperatorSymbol::max_abs() const {
  double m = cb::max_abs(d);
  for (const auto& ci : c) m = std::max(m, cb::max_abs(ci));
  return m;
}

OperatorSymbol to_spherical(const OperatorSymbol& s, const SphericalPoint& p) {
  if (s.chart == Chart::spherical) return s;
  check_point(p);
  const Eigen::Matrix3d J = spherical_jacobian(p);
  OperatorSymbol out;
  out.chart = Chart::spherical;
  out.d = s.d;
  for (int mu = 0; mu < 3; ++mu) {
    Mat4 acc = Mat4::Zero();
    for (int i = 0; i < 3; ++i) acc += J(mu, i) * s.c[static_cast<size_t>(i)];
    out.c[static_cast<size_t>(mu)] = acc;
  }
  return out;
}

OperatorSymbol h_eta_tilde_symbol(const ConformalProfile& profile, double t, const Vec3& x, double m,
                                  bool include_mass) {
  const ProfileJet j = profile.jet(t, x);
  if (!(j.omega > 0.0)) throw DomainError("conformal factor must be positive");
  const auto& g = dirac_gammas();
  OperatorSymbol s;
  for (int i = 0; i < 3; ++i) {
    const Mat4 a = g[0] * g[i + 1];
    s.c[static_cast<size_t>(i)] = -I * a;
    s.d += (-1.5 * I * (j.grad[i] / j.omega)) * a;
  }
  if (include_mass) s.d += m * g[0];
  return s;
}

OperatorSymbol h_eta_tilde_symbol_spherical(const ConformalProfile& profile, double t, const SphericalPoint& p,
                                            double m, bool include_mass) {
  check_point(p);
  double Om;
  const auto w = log_partials(profile, t, p, Om);
  const auto& g = dirac_gammas();
  const auto ge = spherical_gammas(g, p);
  OperatorSymbol s;
  s.chart = Chart::spherical;
  for (int mu = 1; mu < 4; ++mu) {
    const Mat4 a = g[0] * ge[static_cast<size_t>(mu)];
    s.c[static_cast<size_t>(mu - 1)] = -I * a;
    s.d += (-1.5 * I * w[static_cast<size_t>(mu)]) * a;
  }
  if (include_mass) s.d += m * g[0];
  return s;
}

VectorFieldJet VectorFieldJet::from_field(const FieldJet& j, double lambda) {
  VectorFieldJet u;
  u.ut = 1.0 + lambda * j.f;
  u.grad_ut = lambda * j.grad_f;
  u.u = lambda * j.X;
  u.jac = lambda * j.jacX;
  return u;
}

OperatorSymbol symmetrized_hamiltonian_symbol(const ConformalProfile& profile, double t, const Vec3& x,
                                              const VectorFieldJet& u, double m, const SymmetrizedOptions& opt) {
  if (!(u.ut > u.u.norm())) throw DomainError("u is not future-directed timelike (need u^t > |u|)");
  const ProfileJet j = profile.jet(t, x);
  const OperatorSymbol H = h_eta_tilde_symbol(profile, t, x, m, true);
  const auto& g = dirac_gammas();
  const Mat4 Id = Mat4::Identity();
  const double Om = j.omega;
  const Vec3 w = j.grad / Om;
  const double wt = j.dt / Om;

  OperatorSymbol A;
  A.d = u.ut * (H.d + (m * j.delta) * g[0]);
  for (int i = 0; i < 3; ++i) {
    const auto si = static_cast<size_t>(i);
    A.c[si] = u.ut * H.c[si] + (I * u.u[i]) * Id;
    A.d += 0.5 * u.grad_ut[i] * H.c[si];
  }
  A.d += (0.5 * I * u.jac.trace()) * Id;
  for (int i = 0; i < 3; ++i) {
    if (u.u[i] == 0.0) continue;
    const Mat4 gi_low = -g[i + 1];
    Mat4 inner = (1.5 * w[i]) * Id;
    // 1/4 omega_nu [gamma_i, gamma^nu]
    for (int nu = opt.include_time_commutator ? 0 : 1; nu < 4; ++nu) {
      const double wn = nu == 0 ? wt : w[nu - 1];
      if (wn != 0.0) inner += (0.25 * wn) * commutator(gi_low, g[nu]);
    }
    A.d += (I * u.u[i]) * inner;
  }
  return A;
}

double Scenario2Coeffs::max_abs() const {
  double m = std::max(std::abs(c1), std::abs(c5));
  for (int i = 0; i < 3; ++i) {
    m = std::max({m, std::abs(c2[static_cast<size_t>(i)]), std::abs(c3[static_cast<size_t>(i)])});
    for (const auto& v : c4[static_cast<size_t>(i)]) m = std::max(m, std::abs(v));
  }
  return m;
}

OmegaLogJet omega_log_jet(const ProfileJet& j) {
  OmegaLogJet o;
  const double Om = j.omega;
  o.w_t = j.dt / Om;
  o.w = j.grad / Om;
  o.wdot_t = (j.dtt - j.dt * j.dt / Om) / Om;
  o.wdot = (j.grad_dt - j.dt * o.w) / Om;
  return o;
}

namespace {

// Cartesian pieces b_mu, c_mu, d^rho (rho = 0..3) of the decomposition
// H~_eta = gamma^0 gamma^mu (a d_mu + b_mu), K_mu = d_mu + c_mu + d^rho [gamma_mu, gamma_rho].
struct BCD {
  std::array<cplx, 3> b;
  std::array<double, 3> c;
  std::array<double, 4> d;
};

BCD bcd(double wt, const Vec3& w) {
  BCD o;
  for (int i = 0; i < 3; ++i) {
    o.b[static_cast<size_t>(i)] = -1.5 * I * w[i];
    o.c[static_cast<size_t>(i)] = 1.5 * w[i];
    o.d[static_cast<size_t>(i + 1)] = -0.25 * w[i];
  }
  o.d[0] = 0.25 * wt;
  return o;
}

constexpr cplx kA{0.0, -1.0};

}  // namespace

Scenario2Coeffs scenario2_alpha_coeffs(const ConformalProfile& profile, double t, const Vec3& x, const FieldJet& F) {
  Scenario2Coeffs c;
  const ProfileJet j = profile.jet(t, x);
  const OmegaLogJet o = omega_log_jet(j);
  const BCD k = bcd(o.w_t, o.w);
  c.c1 = kA * F.f;
  cplx c5 = 0.5 * I * F.divX();
  for (int mu = 0; mu < 3; ++mu) {
    const auto m = static_cast<size_t>(mu);
    c.c2[m] = I * F.X[mu];
    c.c3[m] = F.f * k.b[m] + 0.5 * kA * F.grad_f[mu];
    for (int rho = 0; rho < 4; ++rho) c.c4[m][static_cast<size_t>(rho)] = I * F.X[mu] * k.d[static_cast<size_t>(rho)];
    c5 += I * F.X[mu] * k.c[m];
  }
  c.c5 = c5;
  return c;
}

Scenario2Coeffs scenario2_beta_coeffs(const ConformalProfile& profile, double t, const Vec3& x, const FieldJet& F,
                                      Dynamics dyn) {
  Scenario2Coeffs c;
  const FieldRates R = field_rates(F, dyn);
  const ProfileJet j = profile.jet(t, x);
  const OmegaLogJet o = omega_log_jet(j);
  const BCD k = bcd(o.w_t, o.w);
  const BCD kd = bcd(o.wdot_t, o.wdot);  // bdot, cdot, ddot
  c.c1 = kA * R.fdot;
  cplx c5 = 0.5 * I * R.div_Xdot;
  for (int mu = 0; mu < 3; ++mu) {
    const auto m = static_cast<size_t>(mu);
    c.c2[m] = I * R.Xdot[mu];
    c.c3[m] = R.fdot * k.b[m] + F.f * kd.b[m] + 0.5 * kA * R.grad_fdot[mu];
    for (int rho = 0; rho < 4; ++rho) {
      const auto r = static_cast<size_t>(rho);
      c.c4[m][r] = I * R.Xdot[mu] * k.d[r] + I * F.X[mu] * kd.d[r];
    }
    c5 += I * R.Xdot[mu] * k.c[m] + I * F.X[mu] * kd.c[m];
  }
  c.c5 = c5;
  return c;
}

Scenario2Coeffs to_spherical(const Scenario2Coeffs& c, const SphericalPoint& p) {
  if (c.chart == Chart::spherical) return c;
  check_point(p);
  const Eigen::Matrix3d J = spherical_jacobian(p);
  const Eigen::Matrix3d E = spherical_basis(p);
  Scenario2Coeffs s;
  s.chart = Chart::spherical;
  s.c1 = c.c1;
  s.c5 = c.c5;
  for (int mu = 0; mu < 3; ++mu) {
    const auto m = static_cast<size_t>(mu);
    cplx v{0.0, 0.0}, w{0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      v += J(mu, i) * c.c2[static_cast<size_t>(i)];
      w += E(i, mu) * c.c3[static_cast<size_t>(i)];
    }
    s.c2[m] = v;
    s.c3[m] = w;
    for (int rho = 0; rho < 4; ++rho) {
      cplx acc{0.0, 0.0};
      for (int i = 0; i < 3; ++i) {
        if (rho == 0) {
          acc += J(mu, i) * c.c4[static_cast<size_t>(i)][0];
        } else {
          for (int l = 0; l < 3; ++l)
            acc += J(mu, i) * J(rho - 1, l) * c.c4[static_cast<size_t>(i)][static_cast<size_t>(l + 1)];
        }
      }
      s.c4[m][static_cast<size_t>(rho)] = acc;
    }
  }
  // c4 in Cartesian factorizes as X^mu d^rho only when built by the
  // coefficient functions; the bilinear transform above assumes that form.
  return s;
}

OperatorSymbol symbol_from_coeffs(const Scenario2Coeffs& c, bool spatial_commutator_only) {
  if (c.chart != Chart::cartesian) throw DomainError("symbol_from_coeffs expects Cartesian coefficients");
  const auto& g = dirac_gammas();
  const Mat4 Id = Mat4::Identity();
  auto low = [&](int rho) -> Mat4 { return rho == 0 ? g[0] : Mat4(-g[rho]); };
  OperatorSymbol s;
  s.d = c.c5 * Id;
  for (int mu = 0; mu < 3; ++mu) {
    const auto m = static_cast<size_t>(mu);
    const Mat4 a = g[0] * g[mu + 1];
    s.c[m] = c.c1 * a + c.c2[m] * Id;
    s.d += c.c3[m] * a;
    for (int rho = spatial_commutator_only ? 1 : 0; rho < 4; ++rho) {
      const cplx v = c.c4[m][static_cast<size_t>(rho)];
      if (v != cplx(0.0, 0.0)) s.d += v * commutator(low(mu + 1), low(rho));
    }
  }
  return s;
}

double conjugation_factor(Conjugation dir, T1Convention conv) {
  if (conv == T1Convention::three_quarters) return 0.75;
  return dir == Conjugation::forward ? -1.5 : 1.5;
}

ConjugatedSymbol conjugate_symbol(const OperatorSymbol& sym, const Vec3& w, Conjugation dir, T1Convention conv) {
  ConjugatedSymbol out;
  out.L = sym;
  const double s = conjugation_factor(dir, conv);
  for (int i = 0; i < 3; ++i)
    if (w[i] != 0.0) out.T += (s * w[i]) * sym.c[static_cast<size_t>(i)];
  return out;
}

SpinorGrid SpinorGrid::sample(const std::function<Eigen::Vector4cd(const Vec3&)>& psi, int n, double h,
                              const Vec3& origin) {
  SpinorGrid g;
  g.n = n;
  g.h = h;
  g.origin = origin;
  g.v.resize(static_cast<size_t>(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) g.v[g.idx(i, j, k)] = psi(g.point(i, j, k));
  return g;
}

SpinorGrid apply_symbol(const std::function<OperatorSymbol(const Vec3&)>& symbol, const SpinorGrid& psi, int threads) {
  SpinorGrid out = psi;
  const int n = psi.n;
  const double inv2h = 1.0 / (2.0 * psi.h);
  auto val = [&](int i, int j, int k) -> Eigen::Vector4cd {
    if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) return Eigen::Vector4cd::Zero();
    return psi.v[psi.idx(i, j, k)];
  };
  parallel_for(static_cast<size_t>(n), threads, [&](size_t kk) {
    const int k = static_cast<int>(kk);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const OperatorSymbol s = symbol(psi.point(i, j, k));
        Eigen::Vector4cd r = s.d * val(i, j, k);
        r += s.c[0] * ((val(i + 1, j, k) - val(i - 1, j, k)) * inv2h);
        r += s.c[1] * ((val(i, j + 1, k) - val(i, j - 1, k)) * inv2h);
        r += s.c[2] * ((val(i, j, k + 1) - val(i, j, k - 1)) * inv2h);
        out.v[psi.idx(i, j, k)] = r;
      }
  });
  return out;
}

cplx grid_inner(const SpinorGrid& psi, const SpinorGrid& phi, const std::function<double(const Vec3&)>& weight) {
  std::vector<cplx> terms(psi.v.size());
  for (int k = 0; k < psi.n; ++k)
    for (int j = 0; j < psi.n; ++j)
      for (int i = 0; i < psi.n; ++i) {
        const size_t id = psi.idx(i, j, k);
        terms[id] = weight(psi.point(i, j, k)) * psi.v[id].dot(phi.v[id]);
      }
  return pairwise_sum(terms.data(), terms.size()) * (psi.h * psi.h * psi.h);
}

}  // namespace cb
