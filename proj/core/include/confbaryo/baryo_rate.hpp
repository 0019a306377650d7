#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "confbaryo/conformal_geometry.hpp"
#include "confbaryo/conformal_profile.hpp"
#include "confbaryo/profile_fourier.hpp"
#include "confbaryo/quadrature.hpp"
#include "confbaryo/regularizing_field.hpp"
#include "confbaryo/spectral_kernels.hpp"

namespace cb {

// Overall factor applied to the I-sums. theorem: the closed-form G
// 2m^2(-w w' + m^2 - k.k')[...] (factor -1/4 relative to the I chain);
// derivation: the I chain as assembled (-m^2 sum I, -lambda^2 sum I).
enum class Normalization { theorem, derivation };
double normalization_factor(Normalization n);

enum class Scenario { scenario1, scenario2, mixed, generic };
std::string to_string(Scenario s);
std::string to_string(Normalization n);
std::string to_string(Conjugation c);
std::string to_string(T1Convention c);
std::string to_string(Dynamics d);

struct LowerOrders {
  double b0 = 0.0;
  double b1 = 0.0;
  std::string rationale;
};
// Orders zero and one vanish identically.
LowerOrders b0_and_b1();

struct RateOptions {
  Normalization normalization = Normalization::theorem;
  Conjugation conjugation = Conjugation::forward;
  T1Convention t1_convention = T1Convention::exact;
  Dynamics dynamics = Dynamics::linearized;
  int grid_n = 32;               // points per axis for grid transforms
  double grid_half_width = 0.0;  // 0: derived from the supports
  int inner_samples = 100;       // r samples per q sample
  int k_table_nodes = 48;        // Chebyshev nodes for K(rho)
  bool scenario1_force_generic = false;
};

// Key/value record of every convention that changes numbers.
std::vector<std::pair<std::string, std::string>> convention_record(const RateOptions& o);

using GFunction = std::function<double(const Vec3& k, const Vec3& kp)>;
// Per-q factory: returns G restricted to k - k' = q. Lets callers cache
// transforms once per momentum transfer.
using GFactory = std::function<GFunction(const Vec3& q)>;

struct RateRequest {
  Scenario scenario = Scenario::scenario1;
  ConformalProfile profile = ConformalProfile::minkowski();
  std::optional<SliceField> field;
  double t = 0.0;
  CutoffConfig cutoffs;  // cutoffs.m is the fermion mass
  QuadConfig quad;
  RateOptions options;
  GFunction G;  // generic only
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct TermValue {
  std::string name;
  double re = 0.0;
  double im = 0.0;
  double error = 0.0;
};

struct RateReport {
  std::string scenario;
  std::string path;    // reduced_1d, generic_mc, vertex_mc, exact_zero, composite
  std::string reason;  // set for exact zeros
  double B2 = 0.0;
  double B2_imag = 0.0;  // imaginary part of the accumulator
  double error_estimate = 0.0;
  double order0 = 0.0;
  double order1 = 0.0;
  bool converged = true;
  double eps = 0.0, Lambda = 0.0, m = 0.0, s_max = 0.0, rho_max = 0.0;
  std::vector<std::pair<std::string, std::string>> convention;
  Table alpha_table;
  Table k_table;
  std::vector<TermValue> terms;
  double perturbation_scale = 0.0;
  long evals = 0;
};

// Chebyshev interpolant on [a, b] through first-kind nodes (endpoints excluded).
class ChebyshevTable {
 public:
  ChebyshevTable() = default;
  ChebyshevTable(double a, double b, int n, const std::function<double(double)>& f);
  double operator()(double x) const;
  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return f_; }
  // |c_{n-1}| + |c_{n-2}| relative to max |f|: a truncation-error proxy.
  double tail_estimate() const;

 private:
  double a_ = 0.0, b_ = 1.0;
  std::vector<double> x_, f_, w_;
};

// K(rho) sampled on Chebyshev nodes of [0, rho_max]; error is the largest
// quadrature error estimate over the nodes.
struct KTable {
  ChebyshevTable cheb;
  double max_error = 0.0;
  long evals = 0;
};
KTable k_table(double rho_max, int nodes, const CutoffConfig& cut, const QuadConfig& quad);

// -int int d^3k d^3k'/(2pi)^6 (Gamma_+ + Gamma_-), nested MC: each of the
// quad.mc_samples estimates draws one q and averages `inner` r samples.
IntegralResult i_ab(const Vertex& A, const Vertex& B, const CutoffConfig& cut, const QuadConfig& quad,
                    int inner = 100);

// Same samples for several vertex pairs. `source(q, at_q, at_mq)` fills the
// vertex values of every vertex at q and -q.
using VertexSource = std::function<void(const Vec3& q, std::vector<VertexValue>& at_q, std::vector<VertexValue>& at_mq)>;
struct VertexPair {
  int a = 0, b = 0;
  std::string name;
};
// Returns one result per pair followed by their sum.
std::vector<IntegralResult> i_ab_multi(size_t nvertices, const VertexSource& source,
                                       const std::vector<VertexPair>& pairs, const CutoffConfig& cut,
                                       const QuadConfig& quad, int inner = 100);

// Deterministic reduction for gamma^0-pair multiplication vertices with radial
// profiles: -2 int rho^2 drho/(2pi)^4 a1hat a2hat K.
IntegralResult i_ab_gamma0_radial(const RadialProfile& a1, const RadialProfile& a2, const CutoffConfig& cut,
                                  const QuadConfig& quad, int k_nodes = 48);

// -int int d^3k d^3k'/(2pi)^6 G / (4 w w' (w + w')^2) over the band.
RateReport rate_generic(const GFunction& G, const CutoffConfig& cut, const QuadConfig& quad, int inner = 100);
RateReport rate_generic(const GFactory& G, const CutoffConfig& cut, const QuadConfig& quad, int inner = 100);

// Scenario-1 G: pref (-w w' + m^2 - k.k') 2 Re(a1hat(q) conj a2hat(q)), q = k - k',
// with pref = 2 m^2 (theorem) or -8 m^2 (derivation).
using HatFunction = std::function<cplx(const Vec3& q)>;
GFunction scenario1_G(const HatFunction& a1, const HatFunction& a2, double m, Normalization n);

// Scalar fields whose transforms build the scenario-2 vertices: 11 for the
// alpha-side operator Y = T1 + L1, 11 for Z = T2 + L2.
constexpr int kScenario2Fields = 22;
std::array<double, kScenario2Fields> scenario2_fields(const ConformalProfile& profile, double t, const Vec3& x,
                                                     const FieldJet& field, Dynamics dyn);

// Position-space Weyl data of Y (which = 0) or Z (which = 1): operator
// a^mu d_mu + d_mu a^mu / 2 + h, i.e. a^mu = symbol c^mu, h = T + d - div(c)/2.
struct WeylDensity {
  std::array<Mat4, 3> a{Mat4::Zero(), Mat4::Zero(), Mat4::Zero()};
  Mat4 h = Mat4::Zero();
};
WeylDensity scenario2_weyl_density(const std::array<double, kScenario2Fields>& fields, int which, double s);

// Vertex values of T1, L1, T2, L2 at one transfer from the field transforms.
std::array<VertexValue, 4> scenario2_vertices(const cplx* hats, double s);

RateReport rate_scenario1(const RateRequest& req);
RateReport rate_scenario2(const RateRequest& req);
RateReport rate_mixed(const RateRequest& req);
// Dispatches on req.scenario.
RateReport compute_rate(const RateRequest& req);

}  // namespace cb
