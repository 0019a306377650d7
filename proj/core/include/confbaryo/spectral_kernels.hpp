#pragma once

#include <functional>
#include <utility>

#include "confbaryo/gamma_algebra.hpp"
#include "confbaryo/quadrature.hpp"

namespace cb {

struct CutoffConfig {
  double eps = 1e-3;     // regularization scale
  double Lambda = 10.0;  // energy cutoff
  double m = 1.0;        // mass
  double mass_factor = 10.0;    // require m < Lambda / mass_factor
  double lambda_factor = 10.0;  // require Lambda < 1 / (lambda_factor * eps)

  // Throws DomainError naming the violated ordering.
  void validate() const;
  // Radial bound of the midpoint momentum, sqrt(max(Lambda^2 - m^2, 0)).
  double s_max() const;
};

enum class Branch { negative, positive };
enum class ChiVariant { gamma0_pair, scalar_pair };

double omega_k(const Vec3& k, double m);

// -(gamma^0 w - gamma.k + m) gamma^0 times the branch step factor
// (Theta(1 + eps w) on the negative branch, Theta(1 - eps w) on the positive one).
Mat4 f_hat_omega(const Vec3& k, double w, double m, Branch branch, double eps);

// 4 (w' w + m^2 -/+ k.k') for the gamma^0 pair / scalar pair.
double chi_closed_form(double w, double wp, const Vec3& k, const Vec3& kp, double m, ChiVariant variant);

// Momentum-space vertex data at one momentum transfer q: the kernel of
// a.d + b between momenta (p, k) with q = p - k is i k.a(q) + b(q); in the
// symmetric (Weyl) form it is i (p+k)/2 . a(q) + b(q).
struct VertexValue {
  bool first_order = false;
  bool weyl = false;
  std::array<Mat4, 3> a{Mat4::Zero(), Mat4::Zero(), Mat4::Zero()};
  Mat4 b = Mat4::Zero();
};

struct Vertex {
  enum class Kind { multiplication, first_order };
  Kind kind = Kind::multiplication;
  std::function<VertexValue(const Vec3& q)> at;

  static Vertex zero();
  // alpha_hat(q) * M
  static Vertex multiplication(const Mat4& M, std::function<cplx(const Vec3&)> profile);
};

Mat4 vertex_kernel(const VertexValue& v, const Vec3& p, const Vec3& k);

// Tr[A(k,k') F_w(k') B(k',k) F_w'(k)] with vertex data already evaluated at
// the transfers q = k - k' (Aq) and -q (Bmq). Branches follow the sign of w.
cplx chi_from_values(const VertexValue& Aq, const VertexValue& Bmq, double w, double wp, const Vec3& k, const Vec3& kp,
                     double m, double eps);

cplx chi_brute(const Vertex& A, const Vertex& B, double w, double wp, const Vec3& k, const Vec3& kp, double m,
               double eps);

// (-w_k w_k' + m^2 - k.k') / ((w_k + w_k')^2 w_k w_k'), evaluated in a
// cancellation-free rearrangement.
double gamma_kernel(const Vec3& k, const Vec3& kp, double m);

// The same kernel in midpoint/transfer variables r = (k+k')/2, q = k - k'.
// Throws DomainError when a^2 <= b^2.
double gamma_kernel_rq(const Vec3& r, const Vec3& q, double m);
// As above but returns 0 on the degenerate set (measure zero).
double gamma_kernel_rq_or_zero(const Vec3& r, const Vec3& q, double m) noexcept;

// Gamma_+/- = chi(-/+ w_k, +/- w_k') / (4 w_k w_k' (w_k + w_k')^2).
std::pair<cplx, cplx> gamma_pm(const Vertex& A, const Vertex& B, const Vec3& k, const Vec3& kp,
                               const CutoffConfig& cut);
std::pair<cplx, cplx> gamma_pm_values(const VertexValue& Aq, const VertexValue& Bmq, const Vec3& k, const Vec3& kp,
                                      const CutoffConfig& cut);

// K(rho) = 2 int_0^{s_max} ds int_0^pi dtheta s^2 sin(theta) Gamma(r, q),
// q = (0,0,rho), r = s (sin theta, 0, cos theta).
IntegralResult k_kernel(double rho, const CutoffConfig& cut, const QuadConfig& quad);

}  // namespace cb
