#pragma once

#include <optional>
#include <random>

#include "multisym/dynamics.hpp"

namespace multisym {

enum class ObservableClass { algebraic, observable_only, not_observable, unchecked };

/// Codimension-one integrand paired with its Hamiltonian vector field when
/// one exists in closed form.
struct ObservableForm {
  DiffForm F;
  std::optional<std::vector<ScalarField>> xi;
  ObservableClass classification = ObservableClass::unchecked;
};

struct XiSolveResult {
  bool algebraic = false;
  double max_residual = 0.0;
  std::function<Vec(const Vec&)> xi_at;  // pointwise solve; meaningful when algebraic
};

/// Solve dF + xi |_ Omega = 0 for the vector field, point by point, by least
/// squares against the contraction matrix. Inconsistency beyond `tol`
/// (relative to the right-hand side) classifies the form as not algebraic.
XiSolveResult solve_xi(const DiffForm& F, const DiffForm& omega, const std::vector<Vec>& points,
                       double tol = 1e-8);

/// Pointwise vector field solving dF + xi |_ Omega = 0; throws
/// NotAlgebraicError when the linear system is inconsistent at the point.
Vec xi_at_point(const DiffForm& F, const DiffForm& omega, const Vec& point, double tol = 1e-8);

/// {H, F} = -dH(xi_F), as a pointwise scalar. Uses the attached field when
/// present, otherwise solves at each evaluation point.
ScalarField pseudobracket(const HamiltonianDensity& H, const ObservableForm& F,
                          const DiffForm& omega);

/// {F, G} = xi_F ^ xi_G |_ Omega with closed-form coefficient fields.
/// Both arguments must carry their vector fields.
DiffForm bracket(const ObservableForm& F, const ObservableForm& G, const DiffForm& omega);

/// Numeric bracket value at one point from already-solved vector fields.
PointForm bracket_at(const Vec& xi_f, const Vec& xi_g, const DiffForm& omega, const Vec& point);

/// Integral of the pullback of F over the lattice slice nearest to t_slice,
/// by the periodic rectangle rule.
double slice_eval(const HamiltonianCurve& curve, const DWChart& dw, double t_slice,
                  const DiffForm& F);

/// Snap a time to its nearest slice index; throws SliceOutOfRange.
int slice_index(const Lattice1p1& lat, double t_slice);

/// Max over interior sites of |dF(X0,X1) - {H,F} omega(X0,X1)|.
double verify_dynamical_relation(const HamiltonianCurve& curve, const DWChart& dw,
                                 const ObservableForm& F, const HamiltonianDensity& H);

/// Max over interior sites of |{H,F} dG(X) - {H,G} dF(X)|.
double verify_pairwise_relation(const HamiltonianCurve& curve, const DWChart& dw,
                                const ObservableForm& F, const ObservableForm& G,
                                const HamiltonianDensity& H);

/// Stress-energy style forms: d/dx^mu |_ theta.
ObservableForm momentum_observable(const DWChart& dw, int mu);

struct ObservableCheckResult {
  bool observable = false;
  int pairs = 0;
  double max_gap = 0.0;
  // counterexample pair when not observable
  std::optional<std::pair<Multivector, Multivector>> counterexample;
};

/// Randomized test of the defining property: decomposable bivectors with the
/// same contraction against Omega must give the same dF value. Pairs are
/// produced by Gauss-Newton projection onto the constraint set from perturbed
/// starts; unresolved trials raise ProjectionFailure rather than passing.
ObservableCheckResult check_observable(const DiffForm& F, const DiffForm& omega, int trials,
                                       uint64_t seed, int min_pairs = 100, double gap_tol = 1e-6);

}  // namespace multisym
