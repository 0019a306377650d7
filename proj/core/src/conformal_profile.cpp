#include "confbaryo/conformal_profile.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <unsupported/Eigen/Splines>

namespace cb {

Vec3 spherical_to_cartesian(const SphericalPoint& p) {
  const double st = std::sin(p.theta);
  return {p.r * st * std::cos(p.phi), p.r * st * std::sin(p.phi), p.r * std::cos(p.theta)};
}

SphericalPoint cartesian_to_spherical(const Vec3& x) {
  const double r = x.norm();
  double phi = std::atan2(x[1], x[0]);
  if (phi < 0.0) phi += 2.0 * M_PI;
  return {r, r > 0.0 ? std::acos(std::clamp(x[2] / r, -1.0, 1.0)) : 0.0, phi};
}

Eigen::Matrix3d spherical_basis(const SphericalPoint& p) {
  const double st = std::sin(p.theta), ct = std::cos(p.theta);
  const double sp = std::sin(p.phi), cp = std::cos(p.phi);
  Eigen::Matrix3d E;
  E.col(0) = Vec3(st * cp, st * sp, ct);
  E.col(1) = p.r * Vec3(ct * cp, ct * sp, -st);
  E.col(2) = p.r * st * Vec3(-sp, cp, 0.0);
  return E;
}

Eigen::Matrix3d spherical_jacobian(const SphericalPoint& p) {
  const double st = std::sin(p.theta), ct = std::cos(p.theta);
  const double sp = std::sin(p.phi), cp = std::cos(p.phi);
  Eigen::Matrix3d J;
  J.row(0) = Vec3(st * cp, st * sp, ct).transpose();
  J.row(1) = (Vec3(ct * cp, ct * sp, -st) / p.r).transpose();
  J.row(2) = (Vec3(-sp, cp, 0.0) / (p.r * st)).transpose();
  return J;
}

ProfileJet ConformalProfile::jet(double t, const Vec3& x) const {
  if (analytic) return analytic(t, x);
  const double h = fd_step;
  ProfileJet j;
  j.delta = delta(t, x);
  j.omega = 1.0 + j.delta;
  const double fp = delta(t + h, x), fm = delta(t - h, x);
  j.dt = (fp - fm) / (2.0 * h);
  j.dtt = (fp - 2.0 * j.delta + fm) / (h * h);
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    j.grad[i] = (delta(t, x + e) - delta(t, x - e)) / (2.0 * h);
    j.grad_dt[i] =
        (delta(t + h, x + e) - delta(t + h, x - e) - delta(t - h, x + e) + delta(t - h, x - e)) / (4.0 * h * h);
  }
  return j;
}

std::array<double, 4> ConformalProfile::spherical_partials(double t, const SphericalPoint& p) const {
  const ProfileJet j = jet(t, spherical_to_cartesian(p));
  const Eigen::Matrix3d E = spherical_basis(p);
  const Vec3 d = E.transpose() * j.grad;
  return {j.dt, d[0], d[1], d[2]};
}

ConformalProfile ConformalProfile::minkowski() {
  ConformalProfile p;
  p.family = "minkowski";
  p.delta = [](double, const Vec3&) { return 0.0; };
  p.analytic = [](double, const Vec3&) { return ProfileJet{}; };
  p.compact_support_radius = 0.0;
  p.radial_center = Vec3::Zero();
  p.spatially_homogeneous = true;
  return p;
}

ConformalProfile ConformalProfile::gaussian_bump(double A, double w, double t0, const Vec3& center) {
  if (!(w > 0.0)) throw DomainError("gaussian_bump requires w > 0");
  if (!(A > -1.0)) throw DomainError("gaussian_bump requires A > -1 so that Omega > 0");
  ConformalProfile p;
  p.family = "gaussian_bump";
  const double w2 = w * w;
  p.delta = [=](double t, const Vec3& x) {
    const double tau = t - t0;
    return A * std::exp(-((x - center).squaredNorm() + tau * tau) / w2);
  };
  p.analytic = [=](double t, const Vec3& x) {
    const double tau = t - t0;
    const Vec3 y = x - center;
    const double g = A * std::exp(-(y.squaredNorm() + tau * tau) / w2);
    ProfileJet j;
    j.delta = g;
    j.omega = 1.0 + g;
    j.dt = -2.0 * tau / w2 * g;
    j.dtt = (4.0 * tau * tau / (w2 * w2) - 2.0 / w2) * g;
    j.grad = (-2.0 / w2 * g) * y;
    j.grad_dt = (4.0 * tau / (w2 * w2) * g) * y;
    return j;
  };
  // Radius beyond which |delta| and the first partials stay below 1e-13.
  double R = w;
  if (std::abs(A) > 0.0) {
    while (std::abs(A) * std::exp(-R * R / w2) * std::max(1.0, 2.0 * R / w2 + 2.0 * R * R / (w2 * w2)) > 1e-13) R += 0.05 * w;
  }
  p.compact_support_radius = R;
  p.radial_center = center;
  return p;
}

ConformalProfile ConformalProfile::flrw_polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw DomainError("flrw polynomial needs at least one coefficient");
  ConformalProfile p;
  p.family = "flrw";
  auto eval = [coeffs](double t, int deriv) {
    double v = 0.0, tp = 1.0;
    for (size_t k = static_cast<size_t>(deriv); k < coeffs.size(); ++k) {
      double c = coeffs[k];
      for (int d = 0; d < deriv; ++d) c *= static_cast<double>(k - static_cast<size_t>(d));
      v += c * tp;
      tp *= t;
    }
    return v;
  };
  p.delta = [eval](double t, const Vec3&) { return eval(t, 0) - 1.0; };
  p.analytic = [eval](double t, const Vec3&) {
    ProfileJet j;
    j.omega = eval(t, 0);
    j.delta = j.omega - 1.0;
    j.dt = eval(t, 1);
    j.dtt = eval(t, 2);
    return j;
  };
  p.radial_center = Vec3::Zero();
  p.spatially_homogeneous = true;
  return p;
}

ConformalProfile ConformalProfile::flrw_exponential(double a, double H) {
  if (!(a > 0.0)) throw DomainError("flrw exponential needs a > 0");
  ConformalProfile p;
  p.family = "flrw";
  p.delta = [a, H](double t, const Vec3&) { return a * std::exp(H * t) - 1.0; };
  p.analytic = [a, H](double t, const Vec3&) {
    ProfileJet j;
    j.omega = a * std::exp(H * t);
    j.delta = j.omega - 1.0;
    j.dt = H * j.omega;
    j.dtt = H * H * j.omega;
    return j;
  };
  p.radial_center = Vec3::Zero();
  p.spatially_homogeneous = true;
  return p;
}

ConformalProfile ConformalProfile::radial_table(const std::vector<double>& r, const std::vector<double>& delta,
                                                const std::vector<double>& delta_t) {
  const size_t n = r.size();
  if (n < 4 || delta.size() != n || delta_t.size() != n) throw DomainError("radial table needs >= 4 rows of r, delta, delta_t");
  for (size_t i = 1; i < n; ++i)
    if (!(r[i] > r[i - 1])) throw DomainError("radial table radii must increase");
  if (r.front() != 0.0) throw DomainError("radial table must start at r = 0");
  using Spline1 = Eigen::Spline<double, 1>;
  const double r0 = r.front(), r1 = r.back();
  Eigen::RowVectorXd knots(static_cast<Eigen::Index>(n)), vd(static_cast<Eigen::Index>(n)), vt(static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i) {
    knots[static_cast<Eigen::Index>(i)] = (r[i] - r0) / (r1 - r0);
    vd[static_cast<Eigen::Index>(i)] = delta[i];
    vt[static_cast<Eigen::Index>(i)] = delta_t[i];
  }
  auto sd = std::make_shared<Spline1>(Eigen::SplineFitting<Spline1>::Interpolate(vd, 3, knots));
  auto st = std::make_shared<Spline1>(Eigen::SplineFitting<Spline1>::Interpolate(vt, 3, knots));
  const double scale = 1.0 / (r1 - r0);
  auto value = [=](const std::shared_ptr<Spline1>& s, double rr, double& d1) {
    if (rr >= r1) {
      d1 = 0.0;
      return 0.0;
    }
    const auto der = s->derivatives((rr - r0) * scale, 1);
    d1 = der(0, 1) * scale;
    return der(0, 0);
  };
  ConformalProfile p;
  p.family = "custom";
  p.delta = [=](double, const Vec3& x) {
    double d1;
    return value(sd, x.norm(), d1);
  };
  p.analytic = [=](double, const Vec3& x) {
    const double rr = x.norm();
    ProfileJet j;
    double dd, dtd;
    j.delta = value(sd, rr, dd);
    j.omega = 1.0 + j.delta;
    j.dt = value(st, rr, dtd);
    if (rr > 0.0) {
      j.grad = (dd / rr) * x;
      j.grad_dt = (dtd / rr) * x;
    }
    return j;
  };
  p.compact_support_radius = r1;
  p.radial_center = Vec3::Zero();
  return p;
}

ConformalProfile ConformalProfile::scaled(const ConformalProfile& base, double c) {
  ConformalProfile p = base;
  p.family = base.family + "_scaled";
  auto bd = base.delta;
  p.delta = [bd, c](double t, const Vec3& x) { return c * bd(t, x); };
  if (base.analytic) {
    auto ba = base.analytic;
    p.analytic = [ba, c](double t, const Vec3& x) {
      ProfileJet j = ba(t, x);
      j.delta *= c;
      j.omega = 1.0 + j.delta;
      j.dt *= c;
      j.dtt *= c;
      j.grad *= c;
      j.grad_dt *= c;
      return j;
    };
  } else {
    p.analytic = nullptr;
  }
  return p;
}

}  // namespace cb
