#include "confbaryo/regularizing_field.hpp"

#include <cmath>
#include <numbers>

namespace cb {

namespace {

// Radius beyond which amp * exp(-s^2/w^2) and its first two derivatives stay
// below 1e-13.
double gaussian_radius(double amp, double w) {
  if (amp == 0.0) return 0.0;
  double R = w;
  const double w2 = w * w;
  while (std::abs(amp) * std::exp(-R * R / w2) * std::max({1.0, 2.0 * R / w2, 4.0 * R * R / (w2 * w2) + 2.0 / w2}) >
         1e-13)
    R += 0.05 * w;
  return R;
}

}  // namespace

SliceField SliceField::zero() {
  SliceField s;
  s.jet = [](const Vec3&) { return FieldJet{}; };
  s.support_radius = 0.0;
  return s;
}

SliceField SliceField::gaussian(double fa, double fw, const Vec3& fc, const Vec3& Xa, double Xw, const Vec3& Xc,
                                double lambda) {
  if (!(fw > 0.0) || !(Xw > 0.0)) throw DomainError("gaussian slice field needs positive widths");
  SliceField s;
  s.family = "gaussian";
  s.lambda = lambda;
  s.identically_zero = fa == 0.0 && Xa.squaredNorm() == 0.0;
  const double fw2 = fw * fw, Xw2 = Xw * Xw;
  s.jet = [=](const Vec3& x) {
    FieldJet j;
    const Vec3 y = x - fc;
    const double g = fa * std::exp(-y.squaredNorm() / fw2);
    j.f = g;
    j.grad_f = (-2.0 * g / fw2) * y;
    j.lap_f = g * (4.0 * y.squaredNorm() / (fw2 * fw2) - 6.0 / fw2);
    const Vec3 z = x - Xc;
    const double e = std::exp(-z.squaredNorm() / Xw2);
    j.X = e * Xa;
    j.jacX = (-2.0 * e / Xw2) * z * Xa.transpose();
    j.grad_divX = (-2.0 * e / Xw2) * (Xa - (2.0 * z.dot(Xa) / Xw2) * z);
    return j;
  };
  const double rf = fa == 0.0 ? 0.0 : gaussian_radius(fa, fw) + fc.norm();
  const double rX = Xa.squaredNorm() == 0.0 ? 0.0 : gaussian_radius(Xa.norm(), Xw) + Xc.norm();
  s.support_radius = std::max(rf, rX);
  return s;
}

SliceField SliceField::offset_bump(double f0, double fa, double fw, double lambda) {
  SliceField s = gaussian(fa, fw, Vec3::Zero(), Vec3::Zero(), 1.0, Vec3::Zero(), lambda);
  s.family = "offset_bump";
  s.identically_zero = false;
  auto base = s.jet;
  s.jet = [base, f0](const Vec3& x) {
    FieldJet j = base(x);
    j.f += f0;
    return j;
  };
  if (f0 != 0.0) s.support_radius.reset();
  return s;
}

FieldRates field_rates(const FieldJet& j, Dynamics dyn) {
  FieldRates r;
  r.fdot = j.divX() / 3.0;
  r.grad_fdot = j.grad_divX / 3.0;
  Vec3 dphi;
  double lap_phi;
  if (dyn == Dynamics::canonical) {
    if (!(j.f > 0.0)) throw DomainError("canonical dynamics needs f > 0 (uses 1/f); use linearized dynamics");
    const double f2 = j.f * j.f;
    dphi = -j.grad_f / f2;
    lap_phi = -j.lap_f / f2 + 2.0 * j.grad_f.squaredNorm() / (f2 * j.f);
  } else {
    dphi = -j.grad_f;
    lap_phi = -j.lap_f;
  }
  r.Xdot = -dphi;
  r.div_Xdot = -lap_phi;
  return r;
}

GridSliceField GridSliceField::sample(const SliceField& field, int n, double half_width) {
  GridSliceField g;
  g.n = n;
  g.h = 2.0 * half_width / (n - 1);
  g.origin = Vec3::Constant(-half_width);
  g.lambda = field.lambda;
  const size_t N = static_cast<size_t>(n) * n * n;
  g.f.resize(N);
  for (auto& c : g.X) c.resize(N);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const FieldJet J = field.jet(g.point(i, j, k));
        const size_t id = g.idx(i, j, k);
        g.f[id] = J.f;
        for (int c = 0; c < 3; ++c) g.X[static_cast<size_t>(c)][id] = J.X[c];
      }
  return g;
}

double GridSliceField::max_abs_diff(const GridSliceField& o) const {
  double m = 0.0;
  for (size_t i = 0; i < f.size(); ++i) {
    m = std::max(m, std::abs(f[i] - o.f[i]));
    for (size_t c = 0; c < 3; ++c) m = std::max(m, std::abs(X[c][i] - o.X[c][i]));
  }
  return m;
}

double GridSliceField::max_outside(double radius, const Vec3& center) const {
  double m = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if ((point(i, j, k) - center).norm() <= radius) continue;
        const size_t id = idx(i, j, k);
        m = std::max({m, std::abs(f[id]), std::abs(X[0][id]), std::abs(X[1][id]), std::abs(X[2][id])});
      }
  return m;
}

namespace {

struct State {
  std::vector<double> f;
  std::array<std::vector<double>, 3> X;
};

// Central difference along axis `a`, replicating edge values outside the grid.
double cdiff(const std::vector<double>& v, const GridSliceField& g, int i, int j, int k, int a) {
  int ip[3] = {i, j, k}, im[3] = {i, j, k};
  ip[a] = std::min(ip[a] + 1, g.n - 1);
  im[a] = std::max(im[a] - 1, 0);
  return (v[g.idx(ip[0], ip[1], ip[2])] - v[g.idx(im[0], im[1], im[2])]) / (2.0 * g.h);
}

State rhs(const State& s, const GridSliceField& g, Dynamics dyn) {
  const size_t N = s.f.size();
  std::vector<double> phi(N);
  for (size_t i = 0; i < N; ++i) {
    if (dyn == Dynamics::canonical) {
      if (!(s.f[i] > 0.0)) throw DomainError("canonical dynamics needs f > 0 on the grid (uses 1/f)");
      phi[i] = 1.0 / s.f[i];
    } else {
      phi[i] = -s.f[i];
    }
  }
  State d;
  d.f.assign(N, 0.0);
  for (auto& c : d.X) c.assign(N, 0.0);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        const size_t id = g.idx(i, j, k);
        double div = 0.0;
        for (int a = 0; a < 3; ++a) {
          div += cdiff(s.X[static_cast<size_t>(a)], g, i, j, k, a);
          d.X[static_cast<size_t>(a)][id] = -cdiff(phi, g, i, j, k, a);
        }
        d.f[id] = div / 3.0;
      }
  return d;
}

State axpy(const State& s, double c, const State& d) {
  State o = s;
  for (size_t i = 0; i < s.f.size(); ++i) {
    o.f[i] += c * d.f[i];
    for (size_t a = 0; a < 3; ++a) o.X[a][i] += c * d.X[a][i];
  }
  return o;
}

}  // namespace

GridSliceField evolve_first_order(const GridSliceField& field, double dt, Dynamics dyn, Integrator integ) {
  if (field.lambda == 0.0) return field;  // u = d_t regardless of f and X
  State s{field.f, field.X};
  State next;
  if (integ == Integrator::euler) {
    next = axpy(s, dt, rhs(s, field, dyn));
  } else {
    const State k1 = rhs(s, field, dyn);
    const State k2 = rhs(axpy(s, 0.5 * dt, k1), field, dyn);
    const State k3 = rhs(axpy(s, 0.5 * dt, k2), field, dyn);
    const State k4 = rhs(axpy(s, dt, k3), field, dyn);
    next = s;
    for (size_t i = 0; i < s.f.size(); ++i) {
      next.f[i] += dt / 6.0 * (k1.f[i] + 2.0 * k2.f[i] + 2.0 * k3.f[i] + k4.f[i]);
      for (size_t a = 0; a < 3; ++a)
        next.X[a][i] += dt / 6.0 * (k1.X[a][i] + 2.0 * k2.X[a][i] + 2.0 * k3.X[a][i] + k4.X[a][i]);
    }
  }
  GridSliceField out = field;
  out.f = std::move(next.f);
  out.X = std::move(next.X);
  return out;
}

GridSliceField divergence_free_grid(double c, double lambda, int n, double half_width) {
  GridSliceField g;
  g.n = n;
  g.h = 2.0 * half_width / (n - 1);
  g.origin = Vec3::Constant(-half_width);
  g.lambda = lambda;
  const size_t N = static_cast<size_t>(n) * n * n;
  g.f.assign(N, c);
  std::array<std::vector<double>, 3> A;
  for (auto& v : A) v.resize(N);
  const double w2 = 0.36;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 x = g.point(i, j, k);
        const double e = std::exp(-x.squaredNorm() / w2);
        const size_t id = g.idx(i, j, k);
        A[0][id] = e * x[1];
        A[1][id] = 0.5 * e;
        A[2][id] = e * x[0] * x[1];
      }
  for (auto& v : g.X) v.assign(N, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const size_t id = g.idx(i, j, k);
        g.X[0][id] = cdiff(A[2], g, i, j, k, 1) - cdiff(A[1], g, i, j, k, 2);
        g.X[1][id] = cdiff(A[0], g, i, j, k, 2) - cdiff(A[2], g, i, j, k, 0);
        g.X[2][id] = cdiff(A[1], g, i, j, k, 0) - cdiff(A[0], g, i, j, k, 1);
      }
  return g;
}

NullBundleSample uniform_bundle(int n_dirs) {
  if (n_dirs < 2) throw DomainError("need at least two directions");
  const int half = n_dirs / 2;
  NullBundleSample s;
  s.directions.reserve(static_cast<size_t>(2 * half));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < half; ++i) {
    const double z = (i + 0.5) / half;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double ph = golden * i;
    const Vec3 n(rho * std::cos(ph), rho * std::sin(ph), z);
    s.directions.push_back(n);
    s.directions.push_back(-n);
  }
  s.weights.assign(s.directions.size(), 1.0 / static_cast<double>(s.directions.size()));
  return s;
}

Eigen::Vector4d geodesic_bundle_oracle(const SliceField& field, double dt, const Vec3& q,
                                       const GeodesicOracleOptions& opt) {
  const NullBundleSample b = uniform_bundle(opt.n_dirs);
  double omega2 = 1.0;
  if (opt.conformal) {
    const double Om = opt.conformal->omega(opt.t0 + dt, q);
    if (!(Om > 0.0)) throw DomainError("conformal factor must be positive");
    omega2 = Om * Om;
  }
  const double scale = 1.0 / omega2;
  const double lam = field.lambda;
  double W = 0.0;
  Eigen::Vector4d xi = Eigen::Vector4d::Zero();
  for (size_t p = 0; p + 1 < b.directions.size(); p += 2) {
    const Vec3& n = b.directions[p];
    Eigen::Vector4d pair = Eigen::Vector4d::Zero();
    for (int s = 0; s < 2; ++s) {
      const Vec3 dir = s == 0 ? n : Vec3(-n);
      const FieldJet j = field.jet(q - dt * dir);
      // eta(u_p, (1, dir)) with u_p = (1 + lambda f, lambda X)
      const double norm = (1.0 + lam * j.f) - lam * j.X.dot(dir);
      if (!(norm > 0.0)) throw DomainError("u is not timelike at a bundle start point");
      const double c = scale / norm;
      pair[0] += c;
      pair.tail<3>() += c * dir;
    }
    const double w = scale * b.weights[p];
    W += 2.0 * w;
    xi += w * pair;
  }
  xi /= W;
  const double n2 = omega2 * (xi[0] * xi[0] - xi.tail<3>().squaredNorm());
  if (!(n2 > 0.0) || !(xi[0] > 0.0)) throw DomainError("averaged bundle tangent is not future timelike");
  return xi / n2;
}

ConformalInvarianceReport conformal_invariance_check(const SliceField& field, double dt,
                                                     const ConformalProfile& profile,
                                                     const std::vector<Vec3>& queries, int n_dirs) {
  ConformalInvarianceReport rep;
  rep.bitwise_equal = true;
  GeodesicOracleOptions flat;
  flat.n_dirs = n_dirs;
  GeodesicOracleOptions conf = flat;
  conf.conformal = &profile;
  for (const Vec3& q : queries) {
    const Eigen::Vector4d a = geodesic_bundle_oracle(field, dt, q, flat);
    const Eigen::Vector4d b = geodesic_bundle_oracle(field, dt, q, conf);
    rep.max_deviation = std::max(rep.max_deviation, (a - b).cwiseAbs().maxCoeff());
    if (!(a.array() == b.array()).all()) rep.bitwise_equal = false;
    ++rep.points;
  }
  return rep;
}

}  // namespace cb
