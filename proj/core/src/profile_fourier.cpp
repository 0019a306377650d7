#include "confbaryo/profile_fourier.hpp"

#include <cmath>
#include <numbers>

namespace cb {

double FourierConvention::norm() { return 1.0 / std::pow(2.0 * std::numbers::pi, 3); }

std::string FourierConvention::describe() {
  return std::string("hat(a)(p) = ") + normalization + " * int a(x) " + kernel + " d^3x";
}

IntegralResult radial_hat(const RadialProfile& alpha, double rho, const QuadConfig& cfg) {
  if (!(rho >= 0.0)) throw DomainError("radial_hat requires rho >= 0");
  const double R = alpha.support_radius;
  const double pre = FourierConvention::norm() * 4.0 * std::numbers::pi;
  if (rho == 0.0) {
    IntegralResult r = integrate_1d([&](double s) { return alpha.f(s) * s * s; }, 0.0, R, cfg);
    r.value *= pre;
    r.error_estimate *= pre;
    return r;
  }
  auto g = [&](double s) { return alpha.f(s) * s * std::sin(rho * s) / rho; };
  if (rho * R <= 10.0) {
    IntegralResult r = integrate_1d(g, 0.0, R, cfg);
    r.value *= pre;
    r.error_estimate *= pre;
    return r;
  }
  // One panel per half period of sin(rho s).
  const double half = std::numbers::pi / rho;
  const int nseg = static_cast<int>(std::ceil(R / half));
  std::vector<double> vals(static_cast<size_t>(nseg));
  IntegralResult out;
  double err = 0.0;
  QuadConfig sub = cfg;
  sub.abs_tol = cfg.abs_tol / nseg;
  for (int i = 0; i < nseg; ++i) {
    const double a = i * half, b = std::min(R, (i + 1) * half);
    IntegralResult r = integrate_1d(g, a, b, sub);
    vals[static_cast<size_t>(i)] = r.re();
    err += r.error_estimate;
    out.evals += r.evals;
    out.converged = out.converged && r.converged;
  }
  out.value = pre * pairwise_sum(vals.data(), vals.size());
  out.error_estimate = pre * err;
  return out;
}

double gaussian_hat(double w, double rho) {
  return w * w * w / std::pow(2.0 * std::numbers::pi, 1.5) * std::exp(-0.5 * w * w * rho * rho);
}

GridField3 GridField3::sample(const std::function<double(const Vec3&)>& f, int n, double h, const Vec3& origin) {
  GridField3 g;
  g.n = n;
  g.h = h;
  g.origin = origin;
  g.values.resize(static_cast<size_t>(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) g.at(i, j, k) = f(g.point(i, j, k));
  return g;
}

GridField3 GridField3::centered(const std::function<double(const Vec3&)>& f, int n, double half_width) {
  const double h = 2.0 * half_width / (n - 1);
  return sample(f, n, h, Vec3::Constant(-half_width));
}

double GridField3::boundary_max() const {
  double mx = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int face : {0, n - 1}) {
        mx = std::max({mx, std::abs(at(face, a, b)), std::abs(at(a, face, b)), std::abs(at(a, b, face))});
      }
  return mx;
}

void check_grid_support(const GridField3& f) {
  double peak = 0.0;
  for (double v : f.values) peak = std::max(peak, std::abs(v));
  if (f.boundary_max() > std::max(1e-12 * peak, 1e-12)) throw DomainError("field support touches the grid boundary");
}

void field_hats_3d(const std::vector<const GridField3*>& fields, const Vec3& p, cplx* out, bool check_support) {
  if (fields.empty()) return;
  const GridField3& g0 = *fields.front();
  const int n = g0.n;
  for (const GridField3* f : fields) {
    if (f->n != n || f->h != g0.h || f->origin != g0.origin) throw DomainError("field_hats_3d: fields must share a grid");
    if (check_support) check_grid_support(*f);
  }
  // Separable phases exp(-i p_d x_d).
  std::array<std::vector<cplx>, 3> ph;
  for (int d = 0; d < 3; ++d) {
    ph[static_cast<size_t>(d)].resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double x = g0.origin[d] + g0.h * i;
      ph[static_cast<size_t>(d)][static_cast<size_t>(i)] = std::polar(1.0, -p[d] * x);
    }
  }
  const double w = g0.h * g0.h * g0.h * FourierConvention::norm();
  std::vector<cplx> row(static_cast<size_t>(n));
  for (size_t fi = 0; fi < fields.size(); ++fi) {
    const std::vector<double>& v = fields[fi]->values;
    cplx total = 0.0;
    for (int k = 0; k < n; ++k) {
      cplx plane = 0.0;
      for (int j = 0; j < n; ++j) {
        const double* line = &v[static_cast<size_t>(n) * (j + static_cast<size_t>(n) * k)];
        double re = 0.0, im = 0.0;
        for (int i = 0; i < n; ++i) {
          re += line[i] * ph[0][static_cast<size_t>(i)].real();
          im += line[i] * ph[0][static_cast<size_t>(i)].imag();
        }
        plane += cplx(re, im) * ph[1][static_cast<size_t>(j)];
      }
      total += plane * ph[2][static_cast<size_t>(k)];
    }
    out[fi] = w * total;
  }
}

cplx field_hat_3d(const GridField3& field, const Vec3& p) {
  cplx out;
  field_hats_3d({&field}, p, &out);
  return out;
}

}  // namespace cb
