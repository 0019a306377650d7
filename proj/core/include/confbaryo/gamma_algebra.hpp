#pragma once

#include <array>
#include <complex>
#include <span>
#include <stdexcept>

#include <Eigen/Core>

namespace cb {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Vec3 = Eigen::Vector3d;

inline constexpr cplx I{0.0, 1.0};

// Raised for inputs outside an operation's domain (degenerate angles,
// nonpositive conformal factor, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Cartesian Dirac matrices gamma^0..gamma^3 in the standard Dirac
// representation, metric signature (+,-,-,-).
struct GammaBasis {
  std::array<Mat4, 4> g;
  const Mat4& operator[](int mu) const { return g[static_cast<size_t>(mu)]; }
};

struct SphericalPoint {
  double r;
  double theta;
  double phi;
};

// Index order t, r, theta, phi.
using SphericalGammas = std::array<Mat4, 4>;

const GammaBasis& dirac_gammas();

// Minkowski gammas in spherical coordinates at p. Throws DomainError when
// sin(theta) < 1e-12 or r <= 0.
SphericalGammas spherical_gammas(const SphericalPoint& p);
SphericalGammas spherical_gammas(const GammaBasis& basis, const SphericalPoint& p);

// gamma_g^j = gamma_eta^j / omega. Throws DomainError for omega <= 0.
SphericalGammas conformal_gammas(const GammaBasis& basis, const SphericalPoint& p, double omega);

cplx trace_product(std::span<const Mat4> ms);
cplx trace_product(std::initializer_list<Mat4> ms);

Mat4 commutator(const Mat4& a, const Mat4& b);
Mat4 anticommutator(const Mat4& a, const Mat4& b);

// Inverse Minkowski metric in spherical coordinates, diagonal entries.
std::array<double, 4> spherical_inverse_metric(const SphericalPoint& p);

// Minkowski metric diag(+1,-1,-1,-1).
inline constexpr std::array<double, 4> kEta{1.0, -1.0, -1.0, -1.0};

double max_abs(const Mat4& m);

}  // namespace cb
