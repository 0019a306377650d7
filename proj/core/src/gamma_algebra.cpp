#include "confbaryo/gamma_algebra.hpp"

#include <cmath>

namespace cb {

namespace {

GammaBasis make_dirac() {
  GammaBasis b;
  const cplx one{1.0, 0.0};
  Mat4 g0 = Mat4::Zero();
  g0(0, 0) = one;
  g0(1, 1) = one;
  g0(2, 2) = -one;
  g0(3, 3) = -one;
  b.g[0] = g0;

  // Pauli matrices.
  using Mat2 = Eigen::Matrix<cplx, 2, 2>;
  std::array<Mat2, 3> sigma;
  sigma[0] << 0.0, 1.0, 1.0, 0.0;
  sigma[1] << 0.0, -I, I, 0.0;
  sigma[2] << 1.0, 0.0, 0.0, -1.0;
  for (int i = 0; i < 3; ++i) {
    Mat4 gi = Mat4::Zero();
    gi.block<2, 2>(0, 2) = sigma[static_cast<size_t>(i)];
    gi.block<2, 2>(2, 0) = -sigma[static_cast<size_t>(i)];
    b.g[static_cast<size_t>(i + 1)] = gi;
  }
  return b;
}

void check_point(const SphericalPoint& p) {
  if (!(p.r > 0.0)) throw DomainError("spherical point requires r > 0");
  if (std::abs(std::sin(p.theta)) < 1e-12) throw DomainError("degenerate angle: sin(theta) < 1e-12");
}

}  // namespace

const GammaBasis& dirac_gammas() {
  static const GammaBasis basis = make_dirac();
  return basis;
}

SphericalGammas spherical_gammas(const SphericalPoint& p) { return spherical_gammas(dirac_gammas(), p); }

SphericalGammas spherical_gammas(const GammaBasis& b, const SphericalPoint& p) {
  check_point(p);
  const double st = std::sin(p.theta), ct = std::cos(p.theta);
  const double sp = std::sin(p.phi), cp = std::cos(p.phi);
  SphericalGammas out;
  out[0] = b[0];
  out[1] = ct * b[3] + st * cp * b[1] + st * sp * b[2];
  out[2] = (1.0 / p.r) * (-st * b[3] + ct * cp * b[1] + ct * sp * b[2]);
  out[3] = (1.0 / (p.r * st)) * (-sp * b[1] + cp * b[2]);
  return out;
}

SphericalGammas conformal_gammas(const GammaBasis& basis, const SphericalPoint& p, double omega) {
  if (!(omega > 0.0)) throw DomainError("conformal factor must be positive");
  SphericalGammas out = spherical_gammas(basis, p);
  for (auto& m : out) m /= omega;
  return out;
}

cplx trace_product(std::span<const Mat4> ms) {
  if (ms.empty()) throw DomainError("trace_product needs at least one matrix");
  Mat4 acc = ms[0];
  for (size_t i = 1; i < ms.size(); ++i) acc = (acc * ms[i]).eval();
  return acc.trace();
}

cplx trace_product(std::initializer_list<Mat4> ms) {
  return trace_product(std::span<const Mat4>(ms.begin(), ms.size()));
}

Mat4 commutator(const Mat4& a, const Mat4& b) { return a * b - b * a; }
Mat4 anticommutator(const Mat4& a, const Mat4& b) { return a * b + b * a; }

std::array<double, 4> spherical_inverse_metric(const SphericalPoint& p) {
  const double st = std::sin(p.theta);
  return {1.0, -1.0, -1.0 / (p.r * p.r), -1.0 / (p.r * p.r * st * st)};
}

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace cb
