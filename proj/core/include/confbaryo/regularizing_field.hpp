#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "confbaryo/conformal_profile.hpp"

namespace cb {

// f, X and the derivatives the vertex coefficients need, at one slice point.
struct FieldJet {
  double f = 0.0;
  Vec3 grad_f = Vec3::Zero();
  double lap_f = 0.0;
  Vec3 X = Vec3::Zero();
  Eigen::Matrix3d jacX = Eigen::Matrix3d::Zero();  // (i, j) = d_i X^j
  Vec3 grad_divX = Vec3::Zero();
  double divX() const { return jacX.trace(); }
};

// Reading of the evolution law for X. canonical: dX/dt = -grad(1/f);
// linearized: dX/dt = +grad f (first order of -grad((1 + lambda f)^-1) / lambda).
enum class Dynamics { canonical, linearized };

// u = (1 + lambda f) d_t + lambda X on one slice.
struct SliceField {
  std::string family = "zero";
  double lambda = 0.0;
  std::optional<double> support_radius;  // unset when f or X is not compactly supported
  std::function<FieldJet(const Vec3&)> jet;
  bool identically_zero = true;

  double f(const Vec3& x) const { return jet(x).f; }
  Vec3 X(const Vec3& x) const { return jet(x).X; }

  static SliceField zero();
  // f = fa exp(-|x - fc|^2 / fw^2), X = Xa exp(-|x - Xc|^2 / Xw^2)
  static SliceField gaussian(double fa, double fw, const Vec3& fc, const Vec3& Xa, double Xw, const Vec3& Xc,
                             double lambda);
  // f = f0 + fa exp(-|x|^2 / fw^2), X = 0 (f0 > 0 keeps 1/f finite).
  static SliceField offset_bump(double f0, double fa, double fw, double lambda);
};

// d_t f, d_t X and the derivatives of those that enter the beta coefficients.
struct FieldRates {
  double fdot = 0.0;
  Vec3 grad_fdot = Vec3::Zero();
  Vec3 Xdot = Vec3::Zero();
  double div_Xdot = 0.0;
};

// phi = 1/f (canonical) or -f (linearized); dX/dt = -grad phi, df/dt = div X / 3.
// Throws DomainError for canonical dynamics when f <= 0.
FieldRates field_rates(const FieldJet& j, Dynamics dyn);

enum class Integrator { euler, rk4 };

// f and X sampled on a cubic grid (same layout as GridField3).
struct GridSliceField {
  int n = 0;
  double h = 0.0;
  Vec3 origin = Vec3::Zero();
  double lambda = 0.0;
  std::vector<double> f;
  std::array<std::vector<double>, 3> X;

  static GridSliceField sample(const SliceField& field, int n, double half_width);
  size_t idx(int i, int j, int k) const { return static_cast<size_t>(i + n * (j + n * k)); }
  Vec3 point(int i, int j, int k) const { return origin + h * Vec3(i, j, k); }
  double max_abs_diff(const GridSliceField& o) const;
  // Largest |f|, |X^i| over grid points farther than radius from center.
  double max_outside(double radius, const Vec3& center = Vec3::Zero()) const;
};

// One step of df/dt = div X / 3, dX/dt = -grad phi(f) with central differences
// (edge values replicated outside the grid). lambda = 0 returns the field unchanged.
GridSliceField evolve_first_order(const GridSliceField& field, double dt, Dynamics dyn,
                                  Integrator integ = Integrator::rk4);

// Field with f = c and X = discrete curl of a compact vector potential, so that
// the central-difference divergence vanishes to rounding.
GridSliceField divergence_free_grid(double c, double lambda, int n, double half_width);

struct NullBundleSample {
  std::vector<Vec3> directions;  // antipodal pairs: entry 2i+1 = -entry 2i
  std::vector<double> weights;   // sum to 1
};

// Fibonacci directions on the upper hemisphere plus their negations.
NullBundleSample uniform_bundle(int n_dirs);

struct GeodesicOracleOptions {
  int n_dirs = 400;
  // When set, tangents and measure are rescaled by Omega^-2(q) and the norm is
  // taken in g = Omega^2 eta; the result must not depend on it.
  const ConformalProfile* conformal = nullptr;
  double t0 = 0.0;
};

// u at q on the slice t0 + dt from null lines (1, n) that start on the slice
// t0 at q - dt n, with tangents rescaled to eta(u_p, tangent) = 1 and averaged;
// returns (u^t, u^x, u^y, u^z). Throws DomainError if the average is not timelike.
Eigen::Vector4d geodesic_bundle_oracle(const SliceField& field, double dt, const Vec3& q,
                                       const GeodesicOracleOptions& opt = {});

struct ConformalInvarianceReport {
  bool rhs_metric_free = true;  // evolve_first_order takes no metric input
  double max_deviation = 0.0;   // max |u_Omega - u_flat| over the query points
  bool bitwise_equal = false;
  int points = 0;
};

ConformalInvarianceReport conformal_invariance_check(const SliceField& field, double dt,
                                                     const ConformalProfile& profile,
                                                     const std::vector<Vec3>& queries, int n_dirs = 400);

}  // namespace cb
