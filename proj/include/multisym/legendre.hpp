#pragma once

#include "multisym/charts.hpp"

namespace multisym {

/// First-order Lagrangian density on maps from an n-dimensional source to a
/// k-dimensional target. Velocity matrices are indexed (i, mu): row = target
/// component, column = source direction; momentum matrices use the same
/// layout, p(i, mu) = p^mu_i. Flattened index a = i*n + mu.
struct LagrangianDensity {
  int n = 2;
  int k = 2;
  std::function<double(const Vec&, const Vec&, const Eigen::MatrixXd&)> eval;
  std::function<Eigen::MatrixXd(const Vec&, const Vec&, const Eigen::MatrixXd&)> dL_dv;
  std::function<Vec(const Vec&, const Vec&, const Eigen::MatrixXd&)> dL_dy;
  std::function<Eigen::MatrixXd(const Vec&, const Vec&, const Eigen::MatrixXd&)> d2L_dv2;

  /// L = 1/2 eta^{mu nu} v_mu v_nu + (m^2/2) y^2 + (lambda/3) y^3, k = 1.
  static LagrangianDensity scalar_cubic(const MetricSignature& eta, double m, double lambda);

  /// L = 1/2 |v|^2 on 2x2 velocities.
  static LagrangianDensity harmonic_map22();

  /// L = -1/2 (v^1_2 - v^2_1)^2.
  static LagrangianDensity maxwell22();

  /// L = 0.
  static LagrangianDensity trivial22();

  /// L = 1/2 |v|^2 + (alpha/4) |v|^4; strictly convex, genuinely nonlinear.
  static LagrangianDensity quartic22(double alpha);
};

/// Scalar Hamiltonian on a chart with its exact gradient.
struct HamiltonianDensity {
  Chart chart;
  ScalarField density;

  double operator()(const Vec& p) const { return density(p); }
  Vec grad(const Vec& p) const { return density.gradient(p); }

  /// e + 1/2 eta_{mu nu} p^mu p^nu - (m^2/2) phi^2 - (lambda/3) phi^3 on a
  /// k = 1 extended momentum chart.
  static HamiltonianDensity scalar_cubic(const DWChart& dw, const MetricSignature& eta,
                                         double m, double lambda);

  /// e - det(p)/r on the full 2x2 chart (zero-Lagrangian problem).
  static HamiltonianDensity lepage_trivial(const LepageChart22& lp);
};

struct DWLegendreResult {
  Eigen::MatrixXd p;
  double hamiltonian;  // p.v - L, without the energy coordinate
};

/// Forward map p = dL/dv, H = <p,v> - L.
DWLegendreResult dw_legendre(const LagrangianDensity& L, const Vec& x, const Vec& y,
                             const Eigen::MatrixXd& v);

/// v^i_mu = dH/dp^mu_i read off the Hamiltonian's exact gradient.
Eigen::MatrixXd dw_inverse_legendre(const HamiltonianDensity& H, const DWChart& dw,
                                    const Vec& x, const Vec& y, const Eigen::MatrixXd& p);

/// Fiber point of the full second-power chart: (e, p, r).
struct LepagePoint {
  double e = 0.0;
  Eigen::Matrix2d p = Eigen::Matrix2d::Zero();
  double r = 0.0;

  Eigen::Matrix<double, 6, 1> as_vector() const;
  static LepagePoint from_vector(const Eigen::Matrix<double, 6, 1>& c);
};

/// <T,P> = e + p^mu_i v^i_mu + r det v for a normalized tangent plane.
double lepage_pairing(const Eigen::Matrix2d& v, const LepagePoint& P);

/// cof(v)(i,mu) = eps^{mu nu} eps_{ij} v(j,nu); the gradient of det v.
Eigen::Matrix2d lepage_cofactor(const Eigen::Matrix2d& v);

/// Solve p from the correspondence equation p + r cof(v) = dL/dv.
Eigen::Matrix2d lepage_correspondence(const LagrangianDensity& L, const Vec& x, const Vec& y,
                                      const Eigen::Matrix2d& v, double r);

struct LepageSolveOptions {
  int homotopy_steps = 8;
  double tol = 1e-12;
  int max_iter = 50;
  double singular_det = 1e-10;
};

struct LepageSolveResult {
  double hamiltonian = 0.0;
  Eigen::Matrix2d v;  // implicit velocity at the stationary point of W
  double residual = 0.0;
  int iterations = 0;
};

/// H(x,y,P) = W(x,y,T,P) at the T with dW/dT = 0, found by damped Newton with
/// the analytic Hessian of W, continued in r from the r = 0 solve.
LepageSolveResult lepage_hamiltonian(const LagrangianDensity& L, const Vec& x, const Vec& y,
                                     const LepagePoint& P, const LepageSolveOptions& opts = {});

/// | dW/dT | at (v, P); zero exactly when the correspondence holds.
double correspondence_residual(const LagrangianDensity& L, const Vec& x, const Vec& y,
                               const Eigen::Matrix2d& v, const LepagePoint& P);

/// Affine plane of fiber points in correspondence with one velocity: a base
/// solution plus two spanning directions in (e, p, r) coordinates. The mixed
/// direction shifts (e, p, r) together; the volume direction is the pure
/// e-axis, which sits on top of the count (n+k)!/(n!k!) - nk - 1 = 1 for the
/// remaining coordinates.
struct Pseudofiber {
  LepagePoint base;
  Eigen::Matrix<double, 6, 1> dir_volume;
  Eigen::Matrix<double, 6, 1> dir_mixed;
};

Pseudofiber pseudofiber_at(const LagrangianDensity& L, const Vec& x, const Vec& y,
                           const Eigen::Matrix2d& v);

/// Closed forms for the three worked fiber Hamiltonians.
double trivial_hamiltonian(const LepagePoint& P);
double harmonic_hamiltonian(const LepagePoint& P);
double maxwell_hamiltonian(const LepagePoint& P);

}  // namespace multisym
