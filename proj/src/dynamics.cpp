#include "multisym/dynamics.hpp"

#include <cmath>

#include "multisym/report.hpp"

namespace multisym {

namespace {

// Centered first difference in time with second-order one-sided ends.
double dt_stencil(const Grid2& f, int it, int ix, double dt) {
  const int nt = f.nt();
  if (it == 0) return (-3.0 * f.at(0, ix) + 4.0 * f.at(1, ix) - f.at(2, ix)) / (2.0 * dt);
  if (it == nt - 1)
    return (3.0 * f.at(nt - 1, ix) - 4.0 * f.at(nt - 2, ix) + f.at(nt - 3, ix)) / (2.0 * dt);
  return (f.at(it + 1, ix) - f.at(it - 1, ix)) / (2.0 * dt);
}

double dx_stencil(const Grid2& f, int it, int ix, const Lattice1p1& lat) {
  return (f.at(it, lat.wrap(ix + 1)) - f.at(it, lat.wrap(ix - 1))) / (2.0 * lat.dx);
}

}  // namespace

Lattice1p1::Lattice1p1(int nt_, int nx_, double dt_, double dx_, double t0_)
    : nt(nt_), nx(nx_), dt(dt_), dx(dx_), t0(t0_) {
  if (nx < 8 || nt < 2) throw std::invalid_argument("Lattice1p1: need nx >= 8, nt >= 2");
  if (dt <= 0.0 || dx <= 0.0) throw std::invalid_argument("Lattice1p1: spacings must be positive");
  if (dt / dx > 1.0 + 1e-12)
    throw CFLViolation("Lattice1p1: dt/dx = " + std::to_string(dt / dx) + " > 1");
}

Grid2 evolve_scalar(const std::vector<double>& phi0, const std::vector<double>& phidot0, double m,
                    double lambda, const Lattice1p1& lat) {
  if (static_cast<int>(phi0.size()) != lat.nx || static_cast<int>(phidot0.size()) != lat.nx)
    throw std::invalid_argument("evolve_scalar: initial data size != nx");
  for (int j = 0; j < lat.nx; ++j)
    if (!std::isfinite(phi0[j]) || !std::isfinite(phidot0[j]))
      throw NonFiniteField("evolve_scalar: non-finite initial data");

  Grid2 phi(lat.nt, lat.nx);
  const double dt2 = lat.dt * lat.dt;
  const double inv_dx2 = 1.0 / (lat.dx * lat.dx);
  auto accel = [&](int it, int ix) {
    double lap = (phi.at(it, lat.wrap(ix + 1)) - 2.0 * phi.at(it, ix) +
                  phi.at(it, lat.wrap(ix - 1))) *
                 inv_dx2;
    double f = phi.at(it, ix);
    return lap - m * m * f - lambda * f * f;
  };

  for (int j = 0; j < lat.nx; ++j) phi.at(0, j) = phi0[j];
  if (lat.nt == 1) return phi;
  for (int j = 0; j < lat.nx; ++j)
    phi.at(1, j) = phi0[j] + lat.dt * phidot0[j] + 0.5 * dt2 * accel(0, j);

  for (int it = 1; it + 1 < lat.nt; ++it) {
    for (int j = 0; j < lat.nx; ++j)
      phi.at(it + 1, j) = 2.0 * phi.at(it, j) - phi.at(it - 1, j) + dt2 * accel(it, j);
    for (int j = 0; j < lat.nx; ++j)
      if (!(std::abs(phi.at(it + 1, j)) < 1e12))
        throw NonFiniteField("evolve_scalar: blow-up at step " + std::to_string(it + 1));
  }
  return phi;
}

HamiltonianCurve lift_to_curve(const Grid2& phi, double m, double lambda, double H0,
                               const Lattice1p1& lat) {
  HamiltonianCurve c;
  c.lattice = lat;
  c.phi = phi;
  c.p0 = Grid2(lat.nt, lat.nx);
  c.p1 = Grid2(lat.nt, lat.nx);
  c.e = Grid2(lat.nt, lat.nx);
  c.m = m;
  c.lambda = lambda;
  c.H0 = H0;

  for (int it = 0; it < lat.nt; ++it)
    for (int ix = 0; ix < lat.nx; ++ix) {
      const double f = phi.at(it, ix);
      const double pt = -dt_stencil(phi, it, ix, lat.dt);  // eta^{00} = -1
      const double px = dx_stencil(phi, it, ix, lat);
      c.p0.at(it, ix) = pt;
      c.p1.at(it, ix) = px;
      // e + (1/2)(-p0^2 + p1^2) - (m^2/2) f^2 - (lambda/3) f^3 = H0
      c.e.at(it, ix) = H0 + 0.5 * (pt * pt - px * px) + 0.5 * m * m * f * f +
                       lambda / 3.0 * f * f * f;
    }
  return c;
}

Vec HamiltonianCurve::site_point(const DWChart& dw, int it, int ix) const {
  Vec pt = Vec::Zero(dw.chart().dim());
  pt[dw.ix(0)] = lattice.t(it);
  pt[dw.ix(1)] = lattice.x(ix);
  pt[dw.iy(1)] = phi.at(it, ix);
  pt[dw.ie()] = e.at(it, ix);
  pt[dw.ip(0, 1)] = p0.at(it, ix);
  pt[dw.ip(1, 1)] = p1.at(it, ix);
  return pt;
}

std::pair<Vec, Vec> HamiltonianCurve::site_tangents(const DWChart& dw, int it, int ix) const {
  const int dim = dw.chart().dim();
  Vec X0 = Vec::Zero(dim), X1 = Vec::Zero(dim);
  X0[dw.ix(0)] = 1.0;
  X0[dw.iy(1)] = dt_stencil(phi, it, ix, lattice.dt);
  X0[dw.ie()] = dt_stencil(e, it, ix, lattice.dt);
  X0[dw.ip(0, 1)] = dt_stencil(p0, it, ix, lattice.dt);
  X0[dw.ip(1, 1)] = dt_stencil(p1, it, ix, lattice.dt);
  X1[dw.ix(1)] = 1.0;
  X1[dw.iy(1)] = dx_stencil(phi, it, ix, lattice);
  X1[dw.ie()] = dx_stencil(e, it, ix, lattice);
  X1[dw.ip(0, 1)] = dx_stencil(p0, it, ix, lattice);
  X1[dw.ip(1, 1)] = dx_stencil(p1, it, ix, lattice);
  return {X0, X1};
}

double verify_hamilton_flow(const HamiltonianCurve& curve, const HamiltonianDensity& H,
                            const DWChart& dw) {
  if (H.chart != dw.chart()) throw ChartMismatch("verify_hamilton_flow: chart mismatch");
  const int dim = dw.chart().dim();
  const Lattice1p1& lat = curve.lattice;

  DiffForm omega = build_omega_ddw(dw);
  // The canonical form has constant coefficients; freeze them once.
  std::vector<std::pair<IndexTuple, double>> terms;
  for (const auto& [idx, cf] : omega.terms()) terms.emplace_back(idx, cf(Vec::Zero(dim)));

  std::vector<ScalarField> dH;
  dH.reserve(dim);
  for (int j = 0; j < dim; ++j) dH.push_back(H.density.partial(j));

  std::vector<double> row_worst(std::max(lat.nt - 4, 0), 0.0);
  parallel_for(2, lat.nt - 2, [&](int it) {
    double worst = 0.0;
    std::vector<double> comps(dim);
    for (int ix = 0; ix < lat.nx; ++ix) {
      Vec pt = curve.site_point(dw, it, ix);
      auto [X0, X1] = curve.site_tangents(dw, it, ix);
      std::fill(comps.begin(), comps.end(), 0.0);
      for (const auto& [idx, val] : terms) {
        // contraction of X0^X1 against a degree-3 basis term
        for (int r = 0; r < 3; ++r) {
          const int a = idx[r];
          const int i = idx[r == 0 ? 1 : 0];
          const int j = idx[r == 2 ? 1 : 2];
          const double minor = X0[i] * X1[j] - X0[j] * X1[i];
          comps[a] += ((r % 2 == 0) ? 1.0 : -1.0) * val * minor;
        }
      }
      // n = 2: X |_ Omega = +dH
      for (int j = 0; j < dim; ++j) {
        const double res = std::abs(comps[j] - dH[j](pt));
        if (res > worst) worst = res;
      }
    }
    row_worst[it - 2] = worst;
  });
  double worst = 0.0;
  for (double w : row_worst) worst = std::max(worst, w);
  return worst;
}

Trajectory classical_reduction(const HamiltonianDensity& H, const DWChart& chart1, double q0,
                               double p0, double T, double dt) {
  const int dim = chart1.chart().dim();
  ScalarField dH_dq = H.density.partial(chart1.iy(1));
  ScalarField dH_dp = H.density.partial(chart1.ip(0, 1));
  auto rhs = [&](double t, double q, double p) {
    Vec pt = Vec::Zero(dim);
    pt[chart1.ix(0)] = t;
    pt[chart1.iy(1)] = q;
    pt[chart1.ip(0, 1)] = p;
    return std::pair{dH_dp(pt), -dH_dq(pt)};
  };

  Trajectory traj;
  traj.dt = dt;
  const int steps = static_cast<int>(std::round(T / dt));
  traj.t.reserve(steps + 1);
  traj.q.reserve(steps + 1);
  traj.p.reserve(steps + 1);
  double t = 0.0, q = q0, p = p0;
  traj.t.push_back(t);
  traj.q.push_back(q);
  traj.p.push_back(p);
  for (int s = 0; s < steps; ++s) {
    auto [k1q, k1p] = rhs(t, q, p);
    auto [k2q, k2p] = rhs(t + dt / 2, q + dt / 2 * k1q, p + dt / 2 * k1p);
    auto [k3q, k3p] = rhs(t + dt / 2, q + dt / 2 * k2q, p + dt / 2 * k2p);
    auto [k4q, k4p] = rhs(t + dt, q + dt * k3q, p + dt * k3p);
    q += dt / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
    p += dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    t += dt;
    traj.t.push_back(t);
    traj.q.push_back(q);
    traj.p.push_back(p);
  }
  return traj;
}

double verify_classical_flow(const Trajectory& traj, const HamiltonianDensity& H,
                             const DWChart& chart1, double H0) {
  const int dim = chart1.chart().dim();
  const int n_samples = static_cast<int>(traj.t.size());
  DiffForm omega = build_omega_ddw(chart1);

  auto point_at = [&](int s) {
    Vec pt = Vec::Zero(dim);
    pt[chart1.ix(0)] = traj.t[s];
    pt[chart1.iy(1)] = traj.q[s];
    pt[chart1.ip(0, 1)] = traj.p[s];
    double h_no_e = H.density(pt);  // density is e + H with e = 0 here
    pt[chart1.ie()] = H0 - h_no_e;
    return pt;
  };

  double worst = 0.0;
  for (int s = 1; s + 1 < n_samples; ++s) {
    Vec prev = point_at(s - 1), cur = point_at(s), next = point_at(s + 1);
    Vec X0 = (next - prev) / (2.0 * traj.dt);
    X0[chart1.ix(0)] = 1.0;
    Multivector X{cur, {X0}};
    PointForm lhs = interior_product(X, omega);
    Vec grad = H.grad(cur);
    for (int j = 0; j < dim; ++j) {
      // n = 1: X |_ Omega = -dH
      double res = std::abs(lhs.comp({j}) + grad[j]);
      worst = std::max(worst, res);
    }
  }
  return worst;
}

AnalyticMap22 AnalyticMap22::identity() {
  AnalyticMap22 m;
  m.u = [](const Eigen::Vector2d& x) { return x; };
  m.du = [](const Eigen::Vector2d&) { return Eigen::Matrix2d(Eigen::Matrix2d::Identity()); };
  m.d2u_dxmu = [](const Eigen::Vector2d&, int) {
    return Eigen::Matrix2d(Eigen::Matrix2d::Zero());
  };
  return m;
}

AnalyticMap22 AnalyticMap22::cubic(const Eigen::Matrix2d& a1, double a3) {
  AnalyticMap22 m;
  m.u = [a1, a3](const Eigen::Vector2d& x) {
    Eigen::Vector2d u = a1 * x;
    u[0] += a3 * (x[0] * x[0] * x[0] / 3.0 + x[0] * x[1] * x[1]);
    u[1] += a3 * (x[1] * x[1] * x[1] / 3.0 + x[0] * x[0] * x[1]);
    return u;
  };
  m.du = [a1, a3](const Eigen::Vector2d& x) {
    Eigen::Matrix2d d = a1;
    d(0, 0) += a3 * (x[0] * x[0] + x[1] * x[1]);
    d(0, 1) += a3 * 2.0 * x[0] * x[1];
    d(1, 0) += a3 * 2.0 * x[0] * x[1];
    d(1, 1) += a3 * (x[0] * x[0] + x[1] * x[1]);
    return d;
  };
  m.d2u_dxmu = [a3](const Eigen::Vector2d& x, int mu) {
    Eigen::Matrix2d d;
    if (mu == 0)
      d << 2 * a3 * x[0], 2 * a3 * x[1], 2 * a3 * x[1], 2 * a3 * x[0];
    else
      d << 2 * a3 * x[1], 2 * a3 * x[0], 2 * a3 * x[0], 2 * a3 * x[1];
    return d;
  };
  return m;
}

AnalyticScalar2 AnalyticScalar2::constant(double c) {
  AnalyticScalar2 s;
  s.f = [c](const Eigen::Vector2d&) { return c; };
  s.df = [](const Eigen::Vector2d&) { return Eigen::Vector2d(Eigen::Vector2d::Zero()); };
  return s;
}

AnalyticScalar2 AnalyticScalar2::two_plus_sin_x1() {
  AnalyticScalar2 s;
  s.f = [](const Eigen::Vector2d& x) { return 2.0 + std::sin(x[0]); };
  s.df = [](const Eigen::Vector2d& x) { return Eigen::Vector2d(std::cos(x[0]), 0.0); };
  return s;
}

LepageCurve22 lepage_trivial_curve(const AnalyticMap22& umap, const AnalyticScalar2& rfun,
                                   double h, int n1, int n2, double x1_max, double x2_max) {
  LepageCurve22 c;
  c.n1 = n1;
  c.n2 = n2;
  c.h = h;
  LepageChart22 lp;
  const int dim = lp.chart().dim();

  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i2 = 0; i2 < n2; ++i2) {
      Eigen::Vector2d x(x1_max * (i1 + 0.5) / n1, x2_max * (i2 + 0.5) / n2);
      const double r = rfun.f(x);
      if (r == 0.0) throw ZeroR("lepage_trivial_curve: r vanishes at a grid node");
      const Eigen::Vector2d dr = rfun.df(x);
      const Eigen::Vector2d u = umap.u(x);
      const Eigen::Matrix2d du = umap.du(x);
      const Eigen::Matrix2d p = -r * lepage_cofactor(du);
      const double det = du.determinant();
      const double e = r * det + h;

      Vec pt = Vec::Zero(dim);
      pt[lp.ix(1)] = x[0];
      pt[lp.ix(2)] = x[1];
      pt[lp.iy(1)] = u[0];
      pt[lp.iy(2)] = u[1];
      pt[lp.ie()] = e;
      for (int mu = 1; mu <= 2; ++mu)
        for (int i = 1; i <= 2; ++i) pt[lp.ip(mu, i)] = p(i - 1, mu - 1);
      pt[lp.ir()] = r;

      std::pair<Vec, Vec> tang{Vec::Zero(dim), Vec::Zero(dim)};
      for (int mu = 0; mu < 2; ++mu) {
        Vec& X = (mu == 0) ? tang.first : tang.second;
        const Eigen::Matrix2d ddu = umap.d2u_dxmu(x, mu);
        // d_mu det(du) = tr(cof(du)^T-pairing): entrywise cof(du) . ddu
        const double ddet = (lepage_cofactor(du).array() * ddu.array()).sum();
        const Eigen::Matrix2d dp = -dr[mu] * lepage_cofactor(du) - r * lepage_cofactor(ddu);
        X[lp.ix(mu + 1)] = 1.0;
        X[lp.iy(1)] = du(0, mu);
        X[lp.iy(2)] = du(1, mu);
        X[lp.ie()] = dr[mu] * det + r * ddet;
        for (int nu = 1; nu <= 2; ++nu)
          for (int i = 1; i <= 2; ++i) X[lp.ip(nu, i)] = dp(i - 1, nu - 1);
        X[lp.ir()] = dr[mu];
      }

      c.xs.push_back(x);
      c.points.push_back(std::move(pt));
      c.tangents.push_back(std::move(tang));
    }
  }
  return c;
}

double verify_lepage_flow(const LepageCurve22& curve, const LepageChart22& lp) {
  DiffForm omega = build_omega_lepage(lp);
  HamiltonianDensity H = HamiltonianDensity::lepage_trivial(lp);
  const int dim = lp.chart().dim();

  double worst = 0.0;
  for (size_t s = 0; s < curve.points.size(); ++s) {
    const Vec& pt = curve.points[s];
    Multivector X{pt, {curve.tangents[s].first, curve.tangents[s].second}};
    PointForm lhs = interior_product(X, omega);
    Vec grad = H.grad(pt);
    for (int j = 0; j < dim; ++j)
      worst = std::max(worst, std::abs(lhs.comp({j}) - grad[j]));
  }
  return worst;
}

}  // namespace multisym
