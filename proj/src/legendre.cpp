#include "multisym/legendre.hpp"

namespace multisym {

namespace {

constexpr int kFlat = 4;  // 2x2 velocity block

Eigen::Vector4d flatten(const Eigen::Matrix2d& m) {
  // a = i*2 + mu, both zero-based
  return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

Eigen::Matrix2d unflatten(const Eigen::Vector4d& a) {
  Eigen::Matrix2d m;
  m << a[0], a[1], a[2], a[3];
  return m;
}

// dW/dT at fixed fiber point: p + r cof(v) - dL/dv.
Eigen::Matrix2d grad_w(const LagrangianDensity& L, const Vec& x, const Vec& y,
                       const Eigen::Matrix2d& v, const Eigen::Matrix2d& p, double r) {
  return p + r * lepage_cofactor(v) - L.dL_dv(x, y, v);
}

// Hessian of W in v: r dcof/dv - d2L/dv2.
Eigen::Matrix4d hess_w(const LagrangianDensity& L, const Vec& x, const Vec& y,
                       const Eigen::Matrix2d& v, double r) {
  Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
  K(0, 3) = 1.0;
  K(1, 2) = -1.0;
  K(2, 1) = -1.0;
  K(3, 0) = 1.0;
  return r * K - L.d2L_dv2(x, y, v);
}

// Damped Newton for grad_w(v) = 0 at fixed (p, r).
Eigen::Matrix2d newton_stationary(const LagrangianDensity& L, const Vec& x, const Vec& y,
                                  const Eigen::Matrix2d& p, double r, Eigen::Matrix2d v,
                                  const LepageSolveOptions& opts, int& iterations) {
  Eigen::Vector4d g = flatten(grad_w(L, x, y, v, p, r));
  for (int it = 0; it < opts.max_iter; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.tol) return v;
    Eigen::Matrix4d J = hess_w(L, x, y, v, r);
    if (std::abs(J.determinant()) < opts.singular_det)
      throw SingularJacobian("lepage_hamiltonian: |det d2W/dT2| below threshold");
    Eigen::Vector4d step = J.fullPivLu().solve(-g);
    double damping = 1.0;
    while (true) {
      Eigen::Matrix2d v_new = v + damping * unflatten(step);
      Eigen::Vector4d g_new = flatten(grad_w(L, x, y, v_new, p, r));
      if (g_new.norm() < g.norm() || damping < 1.0 / 64.0) {
        v = v_new;
        g = g_new;
        break;
      }
      damping *= 0.5;
    }
    ++iterations;
  }
  if (g.lpNorm<Eigen::Infinity>() > opts.tol)
    throw NewtonDivergence("lepage_hamiltonian: no stationary point within iteration budget");
  return v;
}

}  // namespace

LagrangianDensity LagrangianDensity::scalar_cubic(const MetricSignature& eta, double m,
                                                  double lambda) {
  const int n = eta.n();
  LagrangianDensity L;
  L.n = n;
  L.k = 1;
  L.eval = [eta, m, lambda, n](const Vec&, const Vec& y, const Eigen::MatrixXd& v) {
    double kin = 0.0;
    for (int mu = 0; mu < n; ++mu) kin += 0.5 * eta.up(mu, mu) * v(0, mu) * v(0, mu);
    return kin + 0.5 * m * m * y[0] * y[0] + lambda / 3.0 * y[0] * y[0] * y[0];
  };
  L.dL_dv = [eta, n](const Vec&, const Vec&, const Eigen::MatrixXd& v) {
    Eigen::MatrixXd p(1, n);
    for (int mu = 0; mu < n; ++mu) p(0, mu) = eta.up(mu, mu) * v(0, mu);
    return p;
  };
  L.dL_dy = [m, lambda](const Vec&, const Vec& y, const Eigen::MatrixXd&) {
    Vec g(1);
    g[0] = m * m * y[0] + lambda * y[0] * y[0];
    return g;
  };
  L.d2L_dv2 = [eta, n](const Vec&, const Vec&, const Eigen::MatrixXd&) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int mu = 0; mu < n; ++mu) h(mu, mu) = eta.up(mu, mu);
    return h;
  };
  return L;
}

LagrangianDensity LagrangianDensity::harmonic_map22() {
  LagrangianDensity L;
  L.eval = [](const Vec&, const Vec&, const Eigen::MatrixXd& v) { return 0.5 * v.squaredNorm(); };
  L.dL_dv = [](const Vec&, const Vec&, const Eigen::MatrixXd& v) { return Eigen::MatrixXd(v); };
  L.dL_dy = [](const Vec&, const Vec&, const Eigen::MatrixXd&) { return Vec(Vec::Zero(2)); };
  L.d2L_dv2 = [](const Vec&, const Vec&, const Eigen::MatrixXd&) {
    return Eigen::MatrixXd(Eigen::Matrix4d::Identity());
  };
  return L;
}

LagrangianDensity LagrangianDensity::maxwell22() {
  LagrangianDensity L;
  // curl component: v^1_2 - v^2_1 = v(0,1) - v(1,0)
  L.eval = [](const Vec&, const Vec&, const Eigen::MatrixXd& v) {
    double c = v(0, 1) - v(1, 0);
    return -0.5 * c * c;
  };
  L.dL_dv = [](const Vec&, const Vec&, const Eigen::MatrixXd& v) {
    double c = v(0, 1) - v(1, 0);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g(0, 1) = -c;
    g(1, 0) = c;
    return g;
  };
  L.dL_dy = [](const Vec&, const Vec&, const Eigen::MatrixXd&) { return Vec(Vec::Zero(2)); };
  L.d2L_dv2 = [](const Vec&, const Vec&, const Eigen::MatrixXd&) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(kFlat, kFlat);
    // flattened indices: v(0,1) -> 1, v(1,0) -> 2
    h(1, 1) = -1.0;
    h(1, 2) = 1.0;
    h(2, 1) = 1.0;
    h(2, 2) = -1.0;
    return h;
  };
  return L;
}

LagrangianDensity LagrangianDensity::trivial22() {
  LagrangianDensity L;
  L.eval = [](const Vec&, const Vec&, const Eigen::MatrixXd&) { return 0.0; };
  L.dL_dv = [](const Vec&, const Vec&, const Eigen::MatrixXd&) {
    return Eigen::MatrixXd(Eigen::Matrix2d::Zero());
  };
  L.dL_dy = [](const Vec&, const Vec&, const Eigen::MatrixXd&) { return Vec(Vec::Zero(2)); };
  L.d2L_dv2 = [](const Vec&, const Vec&, const Eigen::MatrixXd&) {
    return Eigen::MatrixXd(Eigen::Matrix4d::Zero());
  };
  return L;
}

LagrangianDensity LagrangianDensity::quartic22(double alpha) {
  LagrangianDensity L;
  L.eval = [alpha](const Vec&, const Vec&, const Eigen::MatrixXd& v) {
    double s = v.squaredNorm();
    return 0.5 * s + 0.25 * alpha * s * s;
  };
  L.dL_dv = [alpha](const Vec&, const Vec&, const Eigen::MatrixXd& v) {
    return Eigen::MatrixXd((1.0 + alpha * v.squaredNorm()) * v);
  };
  L.dL_dy = [](const Vec&, const Vec&, const Eigen::MatrixXd&) { return Vec(Vec::Zero(2)); };
  L.d2L_dv2 = [alpha](const Vec&, const Vec&, const Eigen::MatrixXd& v) {
    Eigen::Vector4d w = flatten(v);
    Eigen::MatrixXd h = (1.0 + alpha * w.squaredNorm()) * Eigen::Matrix4d::Identity() +
                        2.0 * alpha * w * w.transpose();
    return h;
  };
  return L;
}

HamiltonianDensity HamiltonianDensity::scalar_cubic(const DWChart& dw, const MetricSignature& eta,
                                                    double m, double lambda) {
  if (dw.k() != 1) throw std::invalid_argument("scalar_cubic: expects a k = 1 chart");
  const int dim = dw.chart().dim();
  ScalarField h = ScalarField::coordinate(dim, dw.ie());
  for (int mu = 0; mu < dw.n(); ++mu) {
    ScalarField p = ScalarField::coordinate(dim, dw.ip(mu, 1));
    h = h + 0.5 * eta.down(mu, mu) * p * p;
  }
  ScalarField phi = ScalarField::coordinate(dim, dw.iy(1));
  h = h - 0.5 * m * m * phi * phi - (lambda / 3.0) * pow_int(phi, 3);
  return {dw.chart(), h};
}

HamiltonianDensity HamiltonianDensity::lepage_trivial(const LepageChart22& lp) {
  const int dim = lp.chart().dim();
  auto c = [dim](int i) { return ScalarField::coordinate(dim, i); };
  ScalarField det_p = c(lp.ip(1, 1)) * c(lp.ip(2, 2)) - c(lp.ip(1, 2)) * c(lp.ip(2, 1));
  ScalarField h = c(lp.ie()) - det_p / c(lp.ir());
  return {lp.chart(), h};
}

DWLegendreResult dw_legendre(const LagrangianDensity& L, const Vec& x, const Vec& y,
                             const Eigen::MatrixXd& v) {
  Eigen::MatrixXd p = L.dL_dv(x, y, v);
  double h = (p.array() * v.array()).sum() - L.eval(x, y, v);
  return {std::move(p), h};
}

Eigen::MatrixXd dw_inverse_legendre(const HamiltonianDensity& H, const DWChart& dw, const Vec& x,
                                    const Vec& y, const Eigen::MatrixXd& p) {
  Vec pt = Vec::Zero(dw.chart().dim());
  for (int mu = 0; mu < dw.n(); ++mu) pt[dw.ix(mu)] = x[mu];
  for (int i = 1; i <= dw.k(); ++i) pt[dw.iy(i)] = y[i - 1];
  for (int mu = 0; mu < dw.n(); ++mu)
    for (int i = 1; i <= dw.k(); ++i) pt[dw.ip(mu, i)] = p(i - 1, mu);
  Eigen::MatrixXd v(dw.k(), dw.n());
  for (int mu = 0; mu < dw.n(); ++mu)
    for (int i = 1; i <= dw.k(); ++i) v(i - 1, mu) = H.density.partial(dw.ip(mu, i))(pt);
  return v;
}

Eigen::Matrix<double, 6, 1> LepagePoint::as_vector() const {
  Eigen::Matrix<double, 6, 1> c;
  c << e, p(0, 0), p(0, 1), p(1, 0), p(1, 1), r;
  return c;
}

LepagePoint LepagePoint::from_vector(const Eigen::Matrix<double, 6, 1>& c) {
  LepagePoint P;
  P.e = c[0];
  P.p << c[1], c[2], c[3], c[4];
  P.r = c[5];
  return P;
}

double lepage_pairing(const Eigen::Matrix2d& v, const LepagePoint& P) {
  return P.e + (P.p.array() * v.array()).sum() + P.r * v.determinant();
}

Eigen::Matrix2d lepage_cofactor(const Eigen::Matrix2d& v) {
  Eigen::Matrix2d c;
  for (int i = 1; i <= 2; ++i)
    for (int mu = 1; mu <= 2; ++mu) {
      double s = 0.0;
      for (int j = 1; j <= 2; ++j)
        for (int nu = 1; nu <= 2; ++nu)
          s += LepageChart22::epsilon(mu, nu) * LepageChart22::epsilon(i, j) * v(j - 1, nu - 1);
      c(i - 1, mu - 1) = s;
    }
  return c;
}

Eigen::Matrix2d lepage_correspondence(const LagrangianDensity& L, const Vec& x, const Vec& y,
                                      const Eigen::Matrix2d& v, double r) {
  return L.dL_dv(x, y, v) - r * lepage_cofactor(v);
}

double correspondence_residual(const LagrangianDensity& L, const Vec& x, const Vec& y,
                               const Eigen::Matrix2d& v, const LepagePoint& P) {
  return grad_w(L, x, y, v, P.p, P.r).lpNorm<Eigen::Infinity>();
}

LepageSolveResult lepage_hamiltonian(const LagrangianDensity& L, const Vec& x, const Vec& y,
                                     const LepagePoint& P, const LepageSolveOptions& opts) {
  LepageSolveResult out;
  Eigen::Matrix2d v = Eigen::Matrix2d::Zero();
  bool solved = false;

  // Continuation in r from the degenerate-direction-free r = 0 solve.
  try {
    int its = 0;
    v = newton_stationary(L, x, y, P.p, 0.0, v, opts, its);
    for (int j = 1; j <= opts.homotopy_steps; ++j) {
      double rj = P.r * static_cast<double>(j) / opts.homotopy_steps;
      v = newton_stationary(L, x, y, P.p, rj, v, opts, its);
    }
    out.iterations = its;
    solved = true;
  } catch (const SingularJacobian&) {
    solved = false;
  } catch (const NewtonDivergence&) {
    solved = false;
  }

  if (!solved) {
    // Direct solve at the target r; rethrows when the target itself is
    // singular (e.g. r = 0 with a flat Lagrangian).
    int its = 0;
    v = newton_stationary(L, x, y, P.p, P.r, Eigen::Matrix2d::Zero(), opts, its);
    out.iterations = its;
  }

  out.v = v;
  out.residual = correspondence_residual(L, x, y, v, P);
  out.hamiltonian = lepage_pairing(v, P) - L.eval(x, y, v);
  return out;
}

Pseudofiber pseudofiber_at(const LagrangianDensity& L, const Vec& x, const Vec& y,
                           const Eigen::Matrix2d& v) {
  Pseudofiber f;
  f.base.r = 1.0;
  f.base.p = lepage_correspondence(L, x, y, v, f.base.r);
  f.base.e = 0.0;
  f.dir_volume.setZero();
  f.dir_volume[0] = 1.0;
  Eigen::Matrix2d mc = -lepage_cofactor(v);
  f.dir_mixed << v.determinant(), mc(0, 0), mc(0, 1), mc(1, 0), mc(1, 1), 1.0;
  return f;
}

double trivial_hamiltonian(const LepagePoint& P) {
  if (P.r == 0.0) throw ZeroR("trivial_hamiltonian: r = 0");
  return P.e - P.p.determinant() / P.r;
}

double harmonic_hamiltonian(const LepagePoint& P) {
  if (std::abs(std::abs(P.r) - 1.0) < 1e-14)
    throw SingularJacobian("harmonic_hamiltonian: |r| = 1");
  return P.e + (0.5 * P.p.squaredNorm() + P.r * P.p.determinant()) / (1.0 - P.r * P.r);
}

double maxwell_hamiltonian(const LepagePoint& P) {
  if (P.r == 0.0) throw ZeroR("maxwell_hamiltonian: r = 0");
  const double p11 = P.p(0, 0), p22 = P.p(1, 1);
  const double p12 = P.p(1, 0);  // p^1_2
  const double p21 = P.p(0, 1);  // p^2_1
  const double sum = p12 + p21, diff = p12 - p21;
  return P.e + (sum * sum - 4.0 * p11 * p22) / (4.0 * P.r) - 0.25 * diff * diff / (2.0 + P.r);
}

}  // namespace multisym
