#pragma once

#include "multisym/legendre.hpp"

namespace multisym {

/// Uniform periodic-in-space grid on a time slab.
struct Lattice1p1 {
  int nt = 2;
  int nx = 8;
  double dt = 0.0;
  double dx = 0.0;
  double t0 = 0.0;

  Lattice1p1() = default;
  Lattice1p1(int nt_, int nx_, double dt_, double dx_, double t0_ = 0.0);

  double t(int it) const { return t0 + it * dt; }
  double x(int ix) const { return ix * dx; }
  double length() const { return nx * dx; }
  int wrap(int ix) const { return ((ix % nx) + nx) % nx; }
};

/// Dense nt x nx array of samples.
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int nt, int nx, double fill = 0.0) : nt_(nt), nx_(nx), data_(nt * nx, fill) {}

  double& at(int it, int ix) { return data_[it * nx_ + ix]; }
  double at(int it, int ix) const { return data_[it * nx_ + ix]; }
  int nt() const { return nt_; }
  int nx() const { return nx_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  int nt_ = 0, nx_ = 0;
  std::vector<double> data_;
};

/// phi_tt = phi_xx - m^2 phi - lambda phi^2, explicit three-level scheme with
/// a second-order Taylor start. Deterministic: identical inputs give
/// bit-identical arrays.
Grid2 evolve_scalar(const std::vector<double>& phi0, const std::vector<double>& phidot0, double m,
                    double lambda, const Lattice1p1& lat);

/// Lattice-sampled solution surface carrying (phi, p^0, p^1, e) per site with
/// the scalar Hamiltonian held constant at H0 by construction of e.
struct HamiltonianCurve {
  Lattice1p1 lattice;
  Grid2 phi;
  Grid2 p0, p1;
  Grid2 e;
  double m = 1.0, lambda = 0.0, H0 = 0.0;

  Vec site_point(const DWChart& dw, int it, int ix) const;
  /// Coordinate tangents (time-like, space-like) from centered differences;
  /// interior time levels only.
  std::pair<Vec, Vec> site_tangents(const DWChart& dw, int it, int ix) const;
};

/// p^mu = eta^{mu nu} d_nu phi by centered differences (second-order one-sided
/// at the time ends); e solves the constancy constraint pointwise.
HamiltonianCurve lift_to_curve(const Grid2& phi, double m, double lambda, double H0,
                               const Lattice1p1& lat);

/// Max over interior sites and all covector components of
/// |X |_ Omega - (-1)^n dH| with the lattice tangent bivector.
double verify_hamilton_flow(const HamiltonianCurve& curve, const HamiltonianDensity& H,
                            const DWChart& dw);

/// Sampled classical trajectory (q, p)(t).
struct Trajectory {
  double dt = 0.0;
  std::vector<double> t, q, p;
};

/// Fourth-order Runge-Kutta integration of dq/dt = dH/dp, dp/dt = -dH/dq for
/// a Hamiltonian given on the chart (x0, y1, e, p0_1).
Trajectory classical_reduction(const HamiltonianDensity& H, const DWChart& chart1, double q0,
                               double p0, double T, double dt);

/// One-dimensional reduction of the flow check: lifts the trajectory with
/// e = H0 - H(q,p) and verifies X |_ Omega = -dH at interior samples.
double verify_classical_flow(const Trajectory& traj, const HamiltonianDensity& H,
                             const DWChart& chart1, double H0 = 0.0);

/// Map data with exact derivatives for the flat-problem solution surfaces.
struct AnalyticMap22 {
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> u;
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> du;             // (i, mu)
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&, int)> d2u_dxmu;  // d/dx^mu of du

  static AnalyticMap22 identity();
  static AnalyticMap22 cubic(const Eigen::Matrix2d& a1, double a3);
};

struct AnalyticScalar2 {
  std::function<double(const Eigen::Vector2d&)> f;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> df;

  static AnalyticScalar2 constant(double c);
  static AnalyticScalar2 two_plus_sin_x1();
};

/// Solution surface of the flat variational problem on the full 2x2 chart:
/// e = r det(du) + h, p^mu_i = -r eps^{mu nu} eps_{ij} d_nu u^j.
struct LepageCurve22 {
  int n1 = 0, n2 = 0;
  double h = 0.0;
  std::vector<Eigen::Vector2d> xs;
  std::vector<Vec> points;                 // chart points, length n1*n2
  std::vector<std::pair<Vec, Vec>> tangents;  // analytic coordinate tangents
};

LepageCurve22 lepage_trivial_curve(const AnalyticMap22& u, const AnalyticScalar2& r, double h,
                                   int n1, int n2, double x1_max = 1.0, double x2_max = 1.0);

/// Max over grid nodes of |X |_ Omega - dH| for the flat-problem Hamiltonian.
double verify_lepage_flow(const LepageCurve22& curve, const LepageChart22& lp);

}  // namespace multisym
