#pragma once

#include <functional>
#include <string>
#include <vector>

#include "confbaryo/gamma_algebra.hpp"
#include "confbaryo/quadrature.hpp"

namespace cb {

// hat(alpha)(p) = (1/(2 pi)^3) int alpha(x) exp(-i p.x) d^3x
struct FourierConvention {
  static constexpr const char* kernel = "exp(-i p.x)";
  static constexpr const char* normalization = "1/(2pi)^3";
  static double norm();
  static std::string describe();
};

struct RadialProfile {
  std::function<double(double)> f;
  double support_radius = 0.0;
};

// (1/(2pi)^3) (4 pi / rho) int_0^R alpha(s) s sin(rho s) ds, with the
// rho -> 0 limit (1/(2pi)^3) 4 pi int alpha s^2 ds. Splits the range at the
// zeros of sin(rho s) once rho R > 10.
IntegralResult radial_hat(const RadialProfile& alpha, double rho, const QuadConfig& cfg);

// Closed-form hat of the radial Gaussian exp(-s^2/(2 w^2)).
double gaussian_hat(double w, double rho);

// Real scalar samples on a cubic grid: point (i,j,k) sits at
// origin + h (i,j,k), storage index i + n (j + n k).
struct GridField3 {
  int n = 0;
  double h = 0.0;
  Vec3 origin = Vec3::Zero();
  std::vector<double> values;

  static GridField3 sample(const std::function<double(const Vec3&)>& f, int n, double h, const Vec3& origin);
  static GridField3 centered(const std::function<double(const Vec3&)>& f, int n, double half_width);
  Vec3 point(int i, int j, int k) const { return origin + h * Vec3(i, j, k); }
  double& at(int i, int j, int k) { return values[static_cast<size_t>(i + n * (j + n * k))]; }
  double at(int i, int j, int k) const { return values[static_cast<size_t>(i + n * (j + n * k))]; }
  // Largest |value| on the six boundary faces.
  double boundary_max() const;
};

// Direct trapezoidal transform of the samples with the convention above.
// Throws DomainError if the field does not vanish (to 1e-12 of its peak,
// absolute floor 1e-12) on the boundary faces.
cplx field_hat_3d(const GridField3& field, const Vec3& p);

// Transforms of several fields sharing one grid, evaluated at one momentum.
void field_hats_3d(const std::vector<const GridField3*>& fields, const Vec3& p, cplx* out, bool check_support = true);

// Throws DomainError if the field does not vanish on the boundary faces.
void check_grid_support(const GridField3& field);

}  // namespace cb
