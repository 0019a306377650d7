#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "confbaryo/gamma_algebra.hpp"

namespace cb {

// Omega and its derivatives at one spacetime point (Cartesian spatial chart).
struct ProfileJet {
  double omega = 1.0;
  double delta = 0.0;  // omega - 1, kept separately to avoid cancellation
  double dt = 0.0;     // d_t omega
  double dtt = 0.0;    // d_t d_t omega
  Vec3 grad = Vec3::Zero();     // d_i omega
  Vec3 grad_dt = Vec3::Zero();  // d_i d_t omega
};

// Conformal factor g = Omega^2 eta. Either an analytic jet is supplied or
// derivatives are taken by central differences of `delta` with step fd_step.
struct ConformalProfile {
  std::string family = "custom";
  std::function<double(double t, const Vec3& x)> delta;
  std::function<ProfileJet(double t, const Vec3& x)> analytic;
  std::optional<double> compact_support_radius;
  std::optional<Vec3> radial_center;  // set when Omega(t, .) is radial about this point
  bool spatially_homogeneous = false;
  double fd_step = 1e-4;

  double omega(double t, const Vec3& x) const { return 1.0 + delta(t, x); }
  ProfileJet jet(double t, const Vec3& x) const;
  // (d_t, d_r, d_theta, d_phi) Omega at the spherical point.
  std::array<double, 4> spherical_partials(double t, const SphericalPoint& p) const;

  static ConformalProfile minkowski();
  // Omega = 1 + A exp(-(|x - c|^2 + (t - t0)^2) / w^2)
  static ConformalProfile gaussian_bump(double A, double w, double t0, const Vec3& center = Vec3::Zero());
  // Omega(t) = sum_k c_k t^k (spatially homogeneous)
  static ConformalProfile flrw_polynomial(std::vector<double> coeffs);
  // Omega(t) = a exp(H t)
  static ConformalProfile flrw_exponential(double a, double H);
  // Radial slice table: columns r, Omega-1, d_t Omega at a single time. The
  // table is frozen in time (second time derivatives are zero).
  static ConformalProfile radial_table(const std::vector<double>& r, const std::vector<double>& delta,
                                       const std::vector<double>& delta_t);
  // delta -> c * delta (all derivatives scale by c).
  static ConformalProfile scaled(const ConformalProfile& base, double c);
};

Vec3 spherical_to_cartesian(const SphericalPoint& p);
SphericalPoint cartesian_to_spherical(const Vec3& x);

// Rows: d(r,theta,phi)/dx^i; J(mu, i) = d u^mu / d x^i.
Eigen::Matrix3d spherical_jacobian(const SphericalPoint& p);
// Columns: coordinate basis vectors e_r, e_theta, e_phi in Cartesian components.
Eigen::Matrix3d spherical_basis(const SphericalPoint& p);

}  // namespace cb
