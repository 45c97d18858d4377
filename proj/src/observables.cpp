#include "multisym/observables.hpp"

namespace multisym {

namespace {

Vec rhs_vector(const DiffForm& dF, const std::vector<IndexTuple>& tuples, const Vec& point) {
  PointForm df = dF.at_point(point);
  Vec b(static_cast<int>(tuples.size()));
  for (size_t r = 0; r < tuples.size(); ++r) b[r] = -df.comp(tuples[r]);
  return b;
}

}  // namespace

Vec xi_at_point(const DiffForm& F, const DiffForm& omega, const Vec& point, double tol) {
  DiffForm dF = exterior_derivative(F);
  auto tuples = increasing_tuples(omega.dim(), omega.degree() - 1);
  Eigen::MatrixXd A = contraction_matrix(omega, point);
  Vec b = rhs_vector(dF, tuples, point);
  Vec xi = A.colPivHouseholderQr().solve(b);
  double res = (A * xi - b).lpNorm<Eigen::Infinity>();
  if (res > tol * std::max(1.0, b.lpNorm<Eigen::Infinity>()))
    throw NotAlgebraicError("xi_at_point: inconsistent system, residual " + std::to_string(res));
  return xi;
}

XiSolveResult solve_xi(const DiffForm& F, const DiffForm& omega, const std::vector<Vec>& points,
                       double tol) {
  if (F.degree() != omega.degree() - 2)
    throw DegreeError("solve_xi: F must have degree deg(Omega) - 2");
  DiffForm dF = exterior_derivative(F);
  auto tuples = increasing_tuples(omega.dim(), omega.degree() - 1);

  XiSolveResult out;
  out.algebraic = true;
  for (const Vec& p : points) {
    Eigen::MatrixXd A = contraction_matrix(omega, p);
    Vec b = rhs_vector(dF, tuples, p);
    Vec xi = A.colPivHouseholderQr().solve(b);
    double res = (A * xi - b).lpNorm<Eigen::Infinity>();
    out.max_residual = std::max(out.max_residual, res);
    if (res > tol * std::max(1.0, b.lpNorm<Eigen::Infinity>())) out.algebraic = false;
  }
  out.xi_at = [dF, omega, tuples](const Vec& p) {
    Eigen::MatrixXd A = contraction_matrix(omega, p);
    Vec b = rhs_vector(dF, tuples, p);
    return Vec(A.colPivHouseholderQr().solve(b));
  };
  return out;
}

ScalarField pseudobracket(const HamiltonianDensity& H, const ObservableForm& F,
                          const DiffForm& omega) {
  const int dim = H.chart.dim();
  std::vector<ScalarField> grad_fields;
  grad_fields.reserve(dim);
  for (int j = 0; j < dim; ++j) grad_fields.push_back(H.density.partial(j));

  if (F.xi) {
    std::vector<ScalarField> xi = *F.xi;
    return ScalarField::opaque(dim, [grad_fields, xi, dim](const Vec& p) {
      double s = 0.0;
      for (int j = 0; j < dim; ++j) s -= grad_fields[j](p) * xi[j](p);
      return s;
    });
  }
  if (F.classification == ObservableClass::not_observable ||
      F.classification == ObservableClass::observable_only)
    throw NotAlgebraicError("pseudobracket: form has no Hamiltonian vector field");
  DiffForm form = F.F;
  return ScalarField::opaque(dim, [grad_fields, form, omega, dim](const Vec& p) {
    Vec xi = xi_at_point(form, omega, p);
    double s = 0.0;
    for (int j = 0; j < dim; ++j) s -= grad_fields[j](p) * xi[j];
    return s;
  });
}

DiffForm bracket(const ObservableForm& F, const ObservableForm& G, const DiffForm& omega) {
  if (!F.xi || !G.xi)
    throw NotAlgebraicError("bracket: closed-form vector fields required on both arguments");
  return contract_field(contract_field(omega, *F.xi), *G.xi);
}

PointForm bracket_at(const Vec& xi_f, const Vec& xi_g, const DiffForm& omega, const Vec& point) {
  Multivector pair{point, {xi_f, xi_g}};
  return interior_product(pair, omega);
}

int slice_index(const Lattice1p1& lat, double t_slice) {
  int it = static_cast<int>(std::lround((t_slice - lat.t0) / lat.dt));
  if (it < 0 || it >= lat.nt ||
      std::abs(t_slice - lat.t(it)) > 0.5 * lat.dt + 1e-9 * std::abs(t_slice))
    throw SliceOutOfRange("slice_index: t = " + std::to_string(t_slice) + " outside the lattice");
  return it;
}

double slice_eval(const HamiltonianCurve& curve, const DWChart& dw, double t_slice,
                  const DiffForm& F) {
  if (F.degree() != dw.n() - 1) throw DegreeError("slice_eval: integrand degree must be n - 1");
  const Lattice1p1& lat = curve.lattice;
  const int it = slice_index(lat, t_slice);
  double total = 0.0;
  for (int ix = 0; ix < lat.nx; ++ix) {
    Vec pt = curve.site_point(dw, it, ix);
    Vec x_tangent = curve.site_tangents(dw, it, ix).second;
    total += evaluate(F, {x_tangent}, pt) * lat.dx;
  }
  return total;
}

double verify_dynamical_relation(const HamiltonianCurve& curve, const DWChart& dw,
                                 const ObservableForm& F, const HamiltonianDensity& H) {
  const Lattice1p1& lat = curve.lattice;
  DiffForm omega = build_omega_ddw(dw);
  DiffForm dF = exterior_derivative(F.F);
  DiffForm vol = omega_volume(dw);
  ScalarField pb = pseudobracket(H, F, omega);

  double worst = 0.0;
  for (int it = 2; it + 2 < lat.nt; ++it)
    for (int ix = 0; ix < lat.nx; ++ix) {
      Vec pt = curve.site_point(dw, it, ix);
      auto [X0, X1] = curve.site_tangents(dw, it, ix);
      double lhs = evaluate(dF, {X0, X1}, pt);
      double rhs = pb(pt) * evaluate(vol, {X0, X1}, pt);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

double verify_pairwise_relation(const HamiltonianCurve& curve, const DWChart& dw,
                                const ObservableForm& F, const ObservableForm& G,
                                const HamiltonianDensity& H) {
  const Lattice1p1& lat = curve.lattice;
  DiffForm omega = build_omega_ddw(dw);
  DiffForm dF = exterior_derivative(F.F);
  DiffForm dG = exterior_derivative(G.F);
  ScalarField pf = pseudobracket(H, F, omega);
  ScalarField pg = pseudobracket(H, G, omega);

  double worst = 0.0;
  for (int it = 2; it + 2 < lat.nt; ++it)
    for (int ix = 0; ix < lat.nx; ++ix) {
      Vec pt = curve.site_point(dw, it, ix);
      auto [X0, X1] = curve.site_tangents(dw, it, ix);
      double lhs = pf(pt) * evaluate(dG, {X0, X1}, pt);
      double rhs = pg(pt) * evaluate(dF, {X0, X1}, pt);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

ObservableForm momentum_observable(const DWChart& dw, int mu) {
  ObservableForm out;
  out.F = contract_basis(build_theta_ddw(dw), dw.ix(mu));
  std::vector<ScalarField> xi;
  const int dim = dw.chart().dim();
  for (int j = 0; j < dim; ++j)
    xi.push_back(ScalarField::constant(dim, j == dw.ix(mu) ? 1.0 : 0.0));
  out.xi = std::move(xi);
  out.classification = ObservableClass::algebraic;
  return out;
}

namespace {

// Plucker coordinates of X1 ^ X2, for comparing bivectors independently of
// the factor representation.
Vec plucker(const std::vector<Vec>& factors) {
  const int dim = static_cast<int>(factors[0].size());
  Vec out(dim * (dim - 1) / 2);
  int k = 0;
  for (int a = 0; a < dim; ++a)
    for (int b = a + 1; b < dim; ++b)
      out[k++] = factors[0][a] * factors[1][b] - factors[0][b] * factors[1][a];
  return out;
}

Vec contraction_values(const Multivector& X, const DiffForm& omega) {
  PointForm c = interior_product(X, omega);
  Vec v = Vec::Zero(omega.dim());
  for (const auto& [idx, val] : c.comps) v[idx[0]] = val;
  return v;
}

}  // namespace

ObservableCheckResult check_observable(const DiffForm& F, const DiffForm& omega, int trials,
                                       uint64_t seed, int min_pairs, double gap_tol) {
  if (F.degree() != omega.degree() - 2)
    throw DegreeError("check_observable: F must have degree deg(Omega) - 2");
  const int dim = omega.dim();
  DiffForm dF = exterior_derivative(F);
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto rand_vec = [&](double scale) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = scale * u(g);
    return v;
  };

  ObservableCheckResult out;
  int failures = 0;
  for (int trial = 0; trial < trials && out.pairs < min_pairs; ++trial) {
    Vec point = rand_vec(1.0);
    Multivector X{point, {rand_vec(1.0), rand_vec(1.0)}};
    Vec target = contraction_values(X, omega);
    const double scale = std::max(1.0, target.lpNorm<Eigen::Infinity>());

    // Perturbed start, projected back onto the constraint set.
    Multivector Y{point, {X.factors[0] + rand_vec(0.75), X.factors[1] + rand_vec(0.75)}};
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      Vec gval = contraction_values(Y, omega) - target;
      if (gval.lpNorm<Eigen::Infinity>() <= 1e-11 * scale) {
        converged = true;
        break;
      }
      Eigen::MatrixXd J(dim, 2 * dim);
      for (int f = 0; f < 2; ++f)
        for (int a = 0; a < dim; ++a) {
          Multivector E = Y;
          E.factors[f] = Vec::Zero(dim);
          E.factors[f][a] = 1.0;
          J.col(f * dim + a) = contraction_values(E, omega);
        }
      Vec step = J.completeOrthogonalDecomposition().solve(-gval);
      Y.factors[0] += step.head(dim);
      Y.factors[1] += step.tail(dim);
    }
    if (!converged) {
      ++failures;
      continue;
    }
    Vec px = plucker(X.factors), py = plucker(Y.factors);
    if ((px - py).norm() <= 1e-6 * (px.norm() + py.norm())) continue;  // same bivector, retry

    double gap = std::abs(evaluate(dF, X.factors, point) - evaluate(dF, Y.factors, point));
    ++out.pairs;
    if (gap > out.max_gap) out.max_gap = gap;
    if (gap > gap_tol && !out.counterexample) out.counterexample = {X, Y};
  }

  if (out.pairs < min_pairs && !out.counterexample)
    throw ProjectionFailure("check_observable: only " + std::to_string(out.pairs) +
                            " constraint-satisfying pairs out of " + std::to_string(trials) +
                            " trials (" + std::to_string(failures) + " projection failures)");
  out.observable = out.max_gap <= gap_tol;
  return out;
}

}  // namespace multisym
