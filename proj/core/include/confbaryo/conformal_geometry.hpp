#pragma once

#include <array>
#include <functional>
#include <vector>

#include "confbaryo/conformal_profile.hpp"
#include "confbaryo/gamma_algebra.hpp"
#include "confbaryo/regularizing_field.hpp"

namespace cb {

// Index order 0 = t, 1 = r, 2 = theta, 3 = phi. G[i][j][k] = Gamma^i_{jk}.
struct ChristoffelTable {
  double G[4][4][4] = {};
  double operator()(int i, int j, int k) const { return G[i][j][k]; }
  double max_abs() const;
};

// Closed forms for g = Omega^2 eta in spherical coordinates. Throws DomainError
// at r <= 0 or sin(theta) < 1e-12.
ChristoffelTable christoffel(const ConformalProfile& profile, double t, const SphericalPoint& p);

// Levi-Civita connection from central differences of the metric components.
ChristoffelTable christoffel_fd(const ConformalProfile& profile, double t, const SphericalPoint& p, double h = 1e-4);

// h^n_{jk} with d_j gamma_g^n = h^n_{jk} gamma_g^k; H[n][j][k].
struct GammaDerivativeTable {
  double H[4][4][4] = {};
};
GammaDerivativeTable gamma_derivative_coefficients(const ConformalProfile& profile, double t, const SphericalPoint& p);

// S_mu with nabla^s_mu = d_mu + S_mu, mu = t, r, theta, phi (closed forms).
std::array<Mat4, 4> spin_connection_corrections(const ConformalProfile& profile, double t, const SphericalPoint& p);
// -1/4 (h^n_{jk} + Gamma^n_{jk}) gamma_g^k gamma_{g n}
std::array<Mat4, 4> spin_connection_general(const ConformalProfile& profile, double t, const SphericalPoint& p);

enum class Chart { cartesian, spherical };

// c^mu d_mu + d over the three spatial coordinates of `chart`.
struct OperatorSymbol {
  Chart chart = Chart::cartesian;
  std::array<Mat4, 3> c{Mat4::Zero(), Mat4::Zero(), Mat4::Zero()};
  Mat4 d = Mat4::Zero();

  double max_abs() const;
};

// Cartesian symbol re-expressed in the spherical chart at p (d is unchanged).
OperatorSymbol to_spherical(const OperatorSymbol& s, const SphericalPoint& p);

// H~_eta = -i gamma^0 gamma^j d_j - (3/2) i (d_j Omega / Omega) gamma^0 gamma^j + m gamma^0.
OperatorSymbol h_eta_tilde_symbol(const ConformalProfile& profile, double t, const Vec3& x, double m,
                                  bool include_mass = true);
// The same operator written directly with the spherical gammas.
OperatorSymbol h_eta_tilde_symbol_spherical(const ConformalProfile& profile, double t, const SphericalPoint& p, double m,
                                            bool include_mass = true);

// Components of a vector field on the slice and their first derivatives
// (Cartesian). jac(i, j) = d_i u^j.
struct VectorFieldJet {
  double ut = 1.0;
  Vec3 grad_ut = Vec3::Zero();
  Vec3 u = Vec3::Zero();
  Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();

  static VectorFieldJet time_direction() { return {}; }
  static VectorFieldJet from_field(const FieldJet& j, double lambda);
};

struct SymmetrizedOptions {
  // Keep the rho = 0 term of the commutator sum (anti-Hermitian whenever
  // d_t Omega != 0 and u has a spatial part).
  bool include_time_commutator = true;
};

// A_t = 1/2 {u^t, H~_eta + (Omega - 1) m gamma^0}
//     + i/2 {u^j, d_j + d_j(Omega^3)/(2 Omega^3) + 1/4 (d_nu Omega / Omega) eta^{rho nu} [gamma_j, gamma_rho]}
// expanded into c^j d_j + d. Throws DomainError unless u^t > |u|.
OperatorSymbol symmetrized_hamiltonian_symbol(const ConformalProfile& profile, double t, const Vec3& x,
                                              const VectorFieldJet& u, double m, const SymmetrizedOptions& opt = {});

// Coefficients of lambda^-1 Delta A (alpha) or lambda^-1 d/dt Delta A (beta):
//   (c1 gamma^0 gamma^mu + c2^mu) d_mu + c3_mu gamma^0 gamma^mu + c4^{mu rho} [gamma_mu, gamma_rho] + c5
// with mu spatial and rho in 0..3 (0 = t).
struct Scenario2Coeffs {
  Chart chart = Chart::cartesian;
  cplx c1{0.0, 0.0};
  std::array<cplx, 3> c2{};
  std::array<cplx, 3> c3{};
  std::array<std::array<cplx, 4>, 3> c4{};
  cplx c5{0.0, 0.0};

  double max_abs() const;
};

// Omega-derived pieces: omega_mu = d_mu Omega / Omega and its time derivative.
struct OmegaLogJet {
  double w_t = 0.0;
  Vec3 w = Vec3::Zero();
  double wdot_t = 0.0;
  Vec3 wdot = Vec3::Zero();
};
OmegaLogJet omega_log_jet(const ProfileJet& j);

Scenario2Coeffs scenario2_alpha_coeffs(const ConformalProfile& profile, double t, const Vec3& x, const FieldJet& field);
Scenario2Coeffs scenario2_beta_coeffs(const ConformalProfile& profile, double t, const Vec3& x, const FieldJet& field,
                                      Dynamics dyn);
// Cartesian coefficients re-expressed in the spherical chart at p.
Scenario2Coeffs to_spherical(const Scenario2Coeffs& c, const SphericalPoint& p);

// Symbol of the coefficient set. `spatial_commutator_only` drops rho = 0.
OperatorSymbol symbol_from_coeffs(const Scenario2Coeffs& c, bool spatial_commutator_only = false);

enum class Conjugation {
  forward,  // Omega^{3/2} L Omega^{-3/2}
  reverse   // Omega^{-3/2} L Omega^{3/2}
};
enum class T1Convention {
  exact,  // T = -/+ (3/2) omega_mu c^mu from the product rule
  three_quarters  // T = (3/4) omega_mu c^mu
};

struct ConjugatedSymbol {
  Mat4 T = Mat4::Zero();
  OperatorSymbol L;
};

// Splits the conjugated operator into the added multiplication part T and
// the unchanged L. `w` holds d_mu Omega / Omega in the chart of `sym`.
ConjugatedSymbol conjugate_symbol(const OperatorSymbol& sym, const Vec3& w, Conjugation dir,
                                  T1Convention conv = T1Convention::exact);
double conjugation_factor(Conjugation dir, T1Convention conv);

// Four-component spinor field on a cubic grid (layout as GridField3).
struct SpinorGrid {
  int n = 0;
  double h = 0.0;
  Vec3 origin = Vec3::Zero();
  std::vector<Eigen::Vector4cd> v;

  static SpinorGrid sample(const std::function<Eigen::Vector4cd(const Vec3&)>& psi, int n, double h,
                           const Vec3& origin);
  size_t idx(int i, int j, int k) const { return static_cast<size_t>(i + n * (j + n * k)); }
  Vec3 point(int i, int j, int k) const { return origin + h * Vec3(i, j, k); }
};

// (c^j d_j + d) psi with second-order central differences; psi is taken to
// vanish outside the grid. `symbol` is queried at every grid point.
SpinorGrid apply_symbol(const std::function<OperatorSymbol(const Vec3&)>& symbol, const SpinorGrid& psi,
                        int threads = 1);

// Trapezoidal sum of weight(x) psi^dagger phi h^3.
cplx grid_inner(const SpinorGrid& psi, const SpinorGrid& phi, const std::function<double(const Vec3&)>& weight);

}  // namespace cb
