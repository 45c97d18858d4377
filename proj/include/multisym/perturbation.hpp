#pragma once

#include "multisym/observables.hpp"

namespace multisym {

/// Scalar function of (t, x) with the derivative data the first-order
/// observable construction consumes. `box` is the wave operator
/// d_tt - d_xx; grid-backed fields implement it with the compact stencil so
/// that discrete solutions annihilate it up to the mass term exactly.
struct SpacetimeField {
  std::function<double(double, double)> f, ft, fx, ftt, ftx, fxx;
  std::function<double(double, double)> box;

  /// A cos(k x - omega t + phase); a solution of the free equation iff
  /// omega^2 = k^2 + m^2.
  static SpacetimeField plane_wave(double amplitude, double k, double omega, double phase = 0.0);

  /// Grid samples with centered stencils (second-order one-sided at the time
  /// ends) and the compact leapfrog wave operator. Evaluation points must be
  /// lattice sites.
  static SpacetimeField from_grid(const Grid2& values, const Lattice1p1& lat);
};

/// Lift an x-dependent scalar onto a k = 1 extended momentum chart with a
/// two-level derivative tower (second derivatives are value-only leaves).
ScalarField lift_to_chart(const SpacetimeField& field, const DWChart& dw);

/// F = (p^mu Phi - eta^{mu nu} phi d_nu Phi) omega_mu together with its
/// closed-form Hamiltonian vector field.
ObservableForm build_F1(const SpacetimeField& phi1, const DWChart& dw,
                        const MetricSignature& eta);

/// Candidate generator data for the dynamical-observable classification:
/// functions of (x, phi) with the derivatives the defining system needs.
struct DynamicalCandidate {
  SpacetimeField Phi;                                        // depends on x only
  std::function<double(double, double, double)> E;           // E(t, x, phi)
  std::function<double(double, double, double)> dE_dphi;
  std::function<double(double, double, double)> dPhi_dphi;   // usually zero
  std::array<std::function<double(double, double)>, 2> P;    // P^0, P^1 of x
  std::array<std::function<double(double, double)>, 2> divP; // d_mu P^mu summand per mu
};

struct ClassificationResult {
  bool dynamical = false;
  double res_compatibility = 0.0;  // dE/dphi - d_mu P^mu
  double res_phi_and_p = 0.0;      // dPhi/dphi and P^mu - eta^{mu nu} d_nu Phi
  double res_closure = 0.0;        // (m^2 phi + lambda phi^2) Phi - E
  std::string first_failed;
};

/// Check the defining system for a dynamical first-order observable on a
/// sample grid of (t, x, phi).
ClassificationResult classify_dynamical(double m, double lambda, const MetricSignature& eta,
                                        const DynamicalCandidate& cand,
                                        const std::vector<std::array<double, 3>>& samples,
                                        double tol = 1e-10);

/// Retarded fundamental solutions of the discrete operator
/// D_tt - D_xx + m^2 with the unit-cell delta normalization: the response to
/// a source at site s vanishes for t <= t(s) and satisfies
/// (D_tt - D_xx + m^2) G = 1[site = s]/(dt dx) exactly at interior times.
class LatticeGreen {
 public:
  LatticeGreen(double m, const Lattice1p1& lat);

  double m() const { return m_; }
  const Lattice1p1& lattice() const { return lat_; }

  /// Full response grid for one source site.
  Grid2 response(int ts, int xs) const;

  /// Response rows at selected time levels, computed in one sweep without
  /// storing the full grid.
  std::vector<std::vector<double>> response_rows(int ts, int xs,
                                                 const std::vector<int>& t_levels) const;

 private:
  double m_;
  Lattice1p1 lat_;
};

/// Second-order kernel Phi2(a, b) = -sum_s Phi1(s) G(s,a) G(s,b) dt dx with
/// sources restricted to t(s) >= t0 + 1, so the kernel and its first
/// discrete time derivative vanish on the t0 slice.
class Kernel2 {
 public:
  Kernel2(const Grid2& phi1, double m, const Lattice1p1& lat, int t0);

  int t0() const { return t0_; }
  const Grid2& phi1() const { return phi1_; }
  const Lattice1p1& lattice() const { return lat_; }
  double mass() const { return m_; }

  struct Site {
    int it, ix;
  };

  /// Kernel values for a batch of site pairs, one sweep over sources.
  std::vector<double> values(const std::vector<std::pair<Site, Site>>& pairs) const;

  /// Convenience single-pair value (sweeps once; prefer the batch form).
  double value(Site a, Site b) const;

 private:
  Grid2 phi1_;
  double m_;
  Lattice1p1 lat_;
  int t0_;
};

/// Tensor-square observable data built on a second-order kernel.
struct F2Tensor {
  Kernel2 kernel;
};

F2Tensor build_F2(Kernel2 kernel);

/// Time slab between two slice indices, both interior to the curve.
struct Slab {
  int it0 = 0;
  int it1 = 0;
};

/// Staggered slice pairing of the curve against a time-indexed field row:
/// sum_x dx [ -(D_t^+ phi) f + phi (D_t^+ f) ] at time level `it`. This is
/// the discrete Wronskian the three-level scheme transports exactly, which
/// keeps the boundary-vs-volume bookkeeping identities sharp at fixed grid.
double slice_pairing(const HamiltonianCurve& curve, const Grid2& f, int it);

/// Boundary functional of the first-order form over the slab:
/// pairing(t1) - pairing(t0).
double eval_boundary_F1(const HamiltonianCurve& curve, const Grid2& phi1, const Slab& slab);

/// Double-slice boundary functional of the tensor form: signed sum over the
/// four slice pairs; the three combinations touching t0 vanish identically
/// for kernels built with the vanishing prescription.
double eval_boundary_F2(const HamiltonianCurve& curve, const F2Tensor& f2, const Slab& slab);

/// The same four slice-pair terms individually, ordered
/// (t1,t1), (t1,t0), (t0,t1), (t0,t0).
std::array<double, 4> boundary_F2_terms(const HamiltonianCurve& curve, const F2Tensor& f2,
                                        const Slab& slab);

/// Volume sum lambda * sum_{t in (t0, t1]} sum_x phi^2 Phi1 dt dx, the
/// Stokes transport of the first-order obstruction.
double slab_volume_obstruction(const HamiltonianCurve& curve, const Grid2& phi1, const Slab& slab);

struct ScalingConfig {
  Lattice1p1 lattice;
  double m = 1.0;
  std::vector<double> lambdas;
  Slab slab;
  std::vector<double> phi0, phidot0;  // initial data for the interacting field
  Grid2 phi1;                         // discrete solution of the free equation
};

struct ScalingRow {
  double lambda = 0.0;
  double r1 = 0.0;  // boundary functional of F1
  double r2 = 0.0;  // r1 + lambda * double-boundary functional of F2
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  double slope_r1 = 0.0;
  double slope_r2 = 0.0;
  bool slopes_defined = false;
};

/// Evolve the interacting field per coupling value and fit log-log slopes of
/// the first-order and corrected residuals.
ScalingReport lambda_scaling_study(const ScalingConfig& config);

/// Least-squares slope of log10|y| against log10 x, skipping x <= 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// --- truncated functional algebra -----------------------------------------

/// Functional with kernels up to tensor order two and an explicit order-zero
/// scalar so the product law has a unit. Coupling weights live inside the
/// kernels; evaluation is
///   c0 + sum first-order boundaries + sum second-order boundaries
///      + sum product-pair boundaries.
struct PerturbativeFunctional {
  double c0 = 1.0;
  Slab slab;
  std::vector<Grid2> first_order;                      // Phi1 grids
  std::vector<std::shared_ptr<const F2Tensor>> second_order;
  std::vector<std::pair<Grid2, Grid2>> product_pairs;  // F1 (x) G1 terms

  double eval(const HamiltonianCurve& curve) const;
  static PerturbativeFunctional zero(const Slab& slab);
};

/// Cauchy product truncated at tensor order two, with order-zero factors
/// acting as scalars.
PerturbativeFunctional product_functionals(const PerturbativeFunctional& A,
                                           const PerturbativeFunctional& B);

}  // namespace multisym
