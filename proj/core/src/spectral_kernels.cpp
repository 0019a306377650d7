#include "confbaryo/spectral_kernels.hpp"

#include <cmath>

#include <Eigen/Geometry>
#include <numbers>
#include <sstream>

namespace cb {

void CutoffConfig::validate() const {
  std::ostringstream os;
  if (!(eps > 0.0)) os << "cutoff eps must be positive; ";
  if (!(Lambda > 0.0)) os << "cutoff Lambda must be positive; ";
  if (!(m >= 0.0)) os << "mass m must be nonnegative; ";
  if (os.str().empty()) {
    if (!(m <= Lambda / mass_factor)) os << "mass ordering violated: need m <= Lambda/" << mass_factor << "; ";
    if (!(Lambda <= 1.0 / (lambda_factor * eps))) os << "cutoff ordering violated: need Lambda <= 1/(" << lambda_factor << "*eps); ";
  }
  if (!os.str().empty()) throw DomainError(os.str());
}

double CutoffConfig::s_max() const { return std::sqrt(std::max(Lambda * Lambda - m * m, 0.0)); }

double omega_k(const Vec3& k, double m) { return std::sqrt(k.squaredNorm() + m * m); }

Mat4 f_hat_omega(const Vec3& k, double w, double m, Branch branch, double eps) {
  const double arg = branch == Branch::negative ? 1.0 + eps * w : 1.0 - eps * w;
  if (!(arg > 0.0)) return Mat4::Zero();
  const GammaBasis& g = dirac_gammas();
  Mat4 inner = w * g[0] - (k[0] * g[1] + k[1] * g[2] + k[2] * g[3]) + m * Mat4::Identity();
  return -(inner * g[0]);
}

double chi_closed_form(double w, double wp, const Vec3& k, const Vec3& kp, double m, ChiVariant variant) {
  const double kk = k.dot(kp);
  return variant == ChiVariant::gamma0_pair ? 4.0 * (wp * w + m * m - kk) : 4.0 * (wp * w + m * m + kk);
}

Vertex Vertex::zero() {
  Vertex v;
  v.at = [](const Vec3&) { return VertexValue{}; };
  return v;
}

Vertex Vertex::multiplication(const Mat4& M, std::function<cplx(const Vec3&)> profile) {
  Vertex v;
  v.at = [M, profile = std::move(profile)](const Vec3& q) {
    VertexValue out;
    out.b = profile(q) * M;
    return out;
  };
  return v;
}

Mat4 vertex_kernel(const VertexValue& v, const Vec3& p, const Vec3& k) {
  if (!v.first_order) return v.b;
  const Vec3 mom = v.weyl ? Vec3(0.5 * (p + k)) : k;
  Mat4 out = v.b;
  for (int mu = 0; mu < 3; ++mu) out += (I * mom[mu]) * v.a[static_cast<size_t>(mu)];
  return out;
}

cplx chi_from_values(const VertexValue& Aq, const VertexValue& Bmq, double w, double wp, const Vec3& k, const Vec3& kp,
                     double m, double eps) {
  const Mat4 A = vertex_kernel(Aq, k, kp);
  const Mat4 B = vertex_kernel(Bmq, kp, k);
  const Mat4 Fw = f_hat_omega(kp, w, m, w < 0.0 ? Branch::negative : Branch::positive, eps);
  const Mat4 Fwp = f_hat_omega(k, wp, m, wp < 0.0 ? Branch::negative : Branch::positive, eps);
  // Tr[(A Fw)(B Fwp)] without forming the last product.
  const Mat4 L = A * Fw;
  const Mat4 R = B * Fwp;
  return (L.transpose().cwiseProduct(R)).sum();
}

cplx chi_brute(const Vertex& A, const Vertex& B, double w, double wp, const Vec3& k, const Vec3& kp, double m,
               double eps) {
  const Vec3 q = k - kp;
  return chi_from_values(A.at(q), B.at(-q), w, wp, k, kp, m, eps);
}

double gamma_kernel(const Vec3& k, const Vec3& kp, double m) {
  const double w = omega_k(k, m), wp = omega_k(kp, m);
  const double ww = w * wp;
  // -w w' + m^2 - k.k' = -(|k x k'|^2 + m^2 |k + k'|^2) / (w w' + m^2 - k.k')
  const double den = ww + m * m - k.dot(kp);
  double num;
  if (den > 1e-300) {
    num = -(k.cross(kp).squaredNorm() + m * m * (k + kp).squaredNorm()) / den;
  } else {
    num = -ww + m * m - k.dot(kp);
  }
  const double s = w + wp;
  return num / (s * s * ww);
}

namespace {

// Returns false on the degenerate set a^2 <= b^2.
bool gamma_rq_impl(const Vec3& r, const Vec3& q, double m, double& out) {
  const double r2 = r.squaredNorm();
  const double a = r2 + 0.25 * q.squaredNorm() + m * m;
  const double b = q.dot(r);
  const double d = (a - b) * (a + b);
  if (!(d > 0.0)) return false;
  const double S = std::sqrt(d);
  // a - 2|r|^2 - S = -(|q x r|^2 + 4 m^2 |r|^2) / (S + a - 2|r|^2)
  const double den = S + a - 2.0 * r2;
  double num;
  if (den > 1e-300) {
    num = -(q.cross(r).squaredNorm() + 4.0 * m * m * r2) / den;
  } else {
    num = a - 2.0 * r2 - S;
  }
  out = num / (2.0 * (a + S) * S);
  return true;
}

}  // namespace

double gamma_kernel_rq(const Vec3& r, const Vec3& q, double m) {
  double out = 0.0;
  if (!gamma_rq_impl(r, q, m, out)) throw DomainError("gamma_kernel_rq: degenerate a^2 <= b^2");
  return out;
}

double gamma_kernel_rq_or_zero(const Vec3& r, const Vec3& q, double m) noexcept {
  double out = 0.0;
  return gamma_rq_impl(r, q, m, out) ? out : 0.0;
}

std::pair<cplx, cplx> gamma_pm_values(const VertexValue& Aq, const VertexValue& Bmq, const Vec3& k, const Vec3& kp,
                                      const CutoffConfig& cut) {
  const double w = omega_k(k, cut.m), wp = omega_k(kp, cut.m);
  const double s = w + wp;
  const double den = 4.0 * w * wp * s * s;
  // F at k' carries energy +-w(k'), F at k carries +-w(k).
  const cplx plus = chi_from_values(Aq, Bmq, -wp, w, k, kp, cut.m, cut.eps) / den;
  const cplx minus = chi_from_values(Aq, Bmq, wp, -w, k, kp, cut.m, cut.eps) / den;
  return {plus, minus};
}

std::pair<cplx, cplx> gamma_pm(const Vertex& A, const Vertex& B, const Vec3& k, const Vec3& kp,
                               const CutoffConfig& cut) {
  const Vec3 q = k - kp;
  return gamma_pm_values(A.at(q), B.at(-q), k, kp, cut);
}

IntegralResult k_kernel(double rho, const CutoffConfig& cut, const QuadConfig& quad) {
  if (!(rho > 0.0)) throw DomainError("k_kernel requires rho > 0");
  const double smax = cut.s_max();
  const Vec3 q(0.0, 0.0, rho);
  const double m = cut.m;
  auto f = [&](double s, double th) {
    const double st = std::sin(th);
    const Vec3 r(s * st, 0.0, s * std::cos(th));
    return 2.0 * s * s * st * gamma_kernel_rq_or_zero(r, q, m);
  };
  return integrate_2d(f, Box2{0.0, smax, 0.0, std::numbers::pi}, quad);
}

}  // namespace cb
