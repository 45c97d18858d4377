#include "multisym/perturbation.hpp"

#include <cmath>

#include "multisym/report.hpp"

namespace multisym {

namespace {

// Neumaier compensated accumulator for long kernel sums.
struct Accum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double t = s + x;
    c += (std::abs(s) >= std::abs(x)) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  double get() const { return s + c; }
};

int snap_index(double v, double origin, double step, int count, const char* what) {
  int i = static_cast<int>(std::lround((v - origin) / step));
  if (i < 0 || i >= count || std::abs(v - (origin + i * step)) > 1e-6 * step + 1e-12)
    throw std::invalid_argument(std::string("SpacetimeField: ") + what +
                                " does not land on a lattice site");
  return i;
}

// Forward leapfrog sweep of the unit-cell impulse response for one source,
// invoking `visit(level, row)` on every computed time level.
template <typename Visit>
void sweep_response(double m, const Lattice1p1& lat, int ts, int xs, Visit&& visit) {
  const int nx = lat.nx;
  std::vector<double> prev(nx, 0.0), cur(nx, 0.0), next(nx, 0.0);
  const double dt2 = lat.dt * lat.dt;
  const double inv_dx2 = 1.0 / (lat.dx * lat.dx);
  for (int t = 0; t <= ts && t < lat.nt; ++t) visit(t, cur);  // zero rows through t(s)
  if (ts + 1 >= lat.nt) return;
  cur[xs] = lat.dt / lat.dx;  // makes (D_tt - D_xx + m^2) G = delta/(dt dx) at the source
  visit(ts + 1, cur);
  for (int t = ts + 1; t + 1 < lat.nt; ++t) {
    for (int j = 0; j < nx; ++j) {
      double lap = (cur[(j + 1) % nx] - 2.0 * cur[j] + cur[(j + nx - 1) % nx]) * inv_dx2;
      next[j] = 2.0 * cur[j] - prev[j] + dt2 * (lap - m * m * cur[j]);
    }
    std::swap(prev, cur);
    std::swap(cur, next);
    visit(t + 1, cur);
  }
}

double pair_rows(const HamiltonianCurve& curve, const std::vector<double>& row_t,
                 const std::vector<double>& row_tp1, int it) {
  const Lattice1p1& lat = curve.lattice;
  Accum a;
  for (int j = 0; j < lat.nx; ++j) {
    double dphi = (curve.phi.at(it + 1, j) - curve.phi.at(it, j)) / lat.dt;
    double df = (row_tp1[j] - row_t[j]) / lat.dt;
    a.add((-dphi * row_t[j] + curve.phi.at(it, j) * df) * lat.dx);
  }
  return a.get();
}

}  // namespace

SpacetimeField SpacetimeField::plane_wave(double amplitude, double k, double omega, double phase) {
  SpacetimeField f;
  auto arg = [k, omega, phase](double t, double x) { return k * x - omega * t + phase; };
  f.f = [=](double t, double x) { return amplitude * std::cos(arg(t, x)); };
  f.ft = [=](double t, double x) { return amplitude * omega * std::sin(arg(t, x)); };
  f.fx = [=](double t, double x) { return -amplitude * k * std::sin(arg(t, x)); };
  f.ftt = [=](double t, double x) { return -amplitude * omega * omega * std::cos(arg(t, x)); };
  f.ftx = [=](double t, double x) { return amplitude * k * omega * std::cos(arg(t, x)); };
  f.fxx = [=](double t, double x) { return -amplitude * k * k * std::cos(arg(t, x)); };
  f.box = [=](double t, double x) {
    return amplitude * (k * k - omega * omega) * std::cos(arg(t, x));
  };
  return f;
}

SpacetimeField SpacetimeField::from_grid(const Grid2& values, const Lattice1p1& lat) {
  auto grid = std::make_shared<const Grid2>(values);
  auto it_of = [lat](double t) { return snap_index(t, lat.t0, lat.dt, lat.nt, "t"); };
  auto ix_of = [lat](double x) { return snap_index(x, 0.0, lat.dx, lat.nx, "x"); };

  SpacetimeField f;
  f.f = [=](double t, double x) { return grid->at(it_of(t), ix_of(x)); };
  f.ft = [=](double t, double x) {
    int it = it_of(t), ix = ix_of(x);
    if (it == 0)
      return (-3.0 * grid->at(0, ix) + 4.0 * grid->at(1, ix) - grid->at(2, ix)) / (2.0 * lat.dt);
    if (it == lat.nt - 1)
      return (3.0 * grid->at(it, ix) - 4.0 * grid->at(it - 1, ix) + grid->at(it - 2, ix)) /
             (2.0 * lat.dt);
    return (grid->at(it + 1, ix) - grid->at(it - 1, ix)) / (2.0 * lat.dt);
  };
  f.fx = [=](double t, double x) {
    int it = it_of(t), ix = ix_of(x);
    return (grid->at(it, lat.wrap(ix + 1)) - grid->at(it, lat.wrap(ix - 1))) / (2.0 * lat.dx);
  };
  f.ftt = [=](double t, double x) {
    int it = std::clamp(it_of(t), 1, lat.nt - 2), ix = ix_of(x);
    return (grid->at(it + 1, ix) - 2.0 * grid->at(it, ix) + grid->at(it - 1, ix)) /
           (lat.dt * lat.dt);
  };
  f.ftx = [=](double t, double x) {
    int it = std::clamp(it_of(t), 1, lat.nt - 2), ix = ix_of(x);
    return (grid->at(it + 1, lat.wrap(ix + 1)) - grid->at(it + 1, lat.wrap(ix - 1)) -
            grid->at(it - 1, lat.wrap(ix + 1)) + grid->at(it - 1, lat.wrap(ix - 1))) /
           (4.0 * lat.dt * lat.dx);
  };
  f.fxx = [=](double t, double x) {
    int it = it_of(t), ix = ix_of(x);
    return (grid->at(it, lat.wrap(ix + 1)) - 2.0 * grid->at(it, ix) +
            grid->at(it, lat.wrap(ix - 1))) /
           (lat.dx * lat.dx);
  };
  f.box = [ftt = f.ftt, fxx = f.fxx](double t, double x) { return ftt(t, x) - fxx(t, x); };
  return f;
}

ScalarField lift_to_chart(const SpacetimeField& field, const DWChart& dw) {
  const int dim = dw.chart().dim();
  const int it_idx = dw.ix(0), ix_idx = dw.ix(1);
  auto wrap_value = [dim, it_idx, ix_idx](std::function<double(double, double)> g) {
    return [dim, it_idx, ix_idx, g](const Vec& p) { return g(p[it_idx], p[ix_idx]); };
  };
  ScalarField zero = ScalarField::constant(dim, 0.0);
  std::vector<ScalarField> zeros(dim, zero);

  auto leaf = [&](std::function<double(double, double)> g) {
    return ScalarField::opaque(dim, wrap_value(g));
  };
  std::vector<ScalarField> ft_parts = zeros, fx_parts = zeros, f_parts = zeros;
  ft_parts[it_idx] = leaf(field.ftt);
  ft_parts[ix_idx] = leaf(field.ftx);
  fx_parts[it_idx] = leaf(field.ftx);
  fx_parts[ix_idx] = leaf(field.fxx);
  ScalarField ft = ScalarField::with_partials(dim, wrap_value(field.ft), std::move(ft_parts));
  ScalarField fx = ScalarField::with_partials(dim, wrap_value(field.fx), std::move(fx_parts));
  f_parts[it_idx] = ft;
  f_parts[ix_idx] = fx;
  return ScalarField::with_partials(dim, wrap_value(field.f), std::move(f_parts));
}

ObservableForm build_F1(const SpacetimeField& phi1, const DWChart& dw,
                        const MetricSignature& eta) {
  if (dw.n() != 2 || dw.k() != 1)
    throw std::invalid_argument("build_F1: expects the (n=2, k=1) chart");
  const int dim = dw.chart().dim();
  ScalarField phi = ScalarField::coordinate(dim, dw.iy(1));
  ScalarField p0 = ScalarField::coordinate(dim, dw.ip(0, 1));
  ScalarField p1 = ScalarField::coordinate(dim, dw.ip(1, 1));
  ScalarField Phi = lift_to_chart(phi1, dw);
  ScalarField Phi_t = Phi.partial(dw.ix(0));
  ScalarField Phi_x = Phi.partial(dw.ix(1));

  // A^mu = p^mu Phi - eta^{mu nu} phi d_nu Phi
  ScalarField A0 = p0 * Phi - eta.up(0, 0) * phi * Phi_t;
  ScalarField A1 = p1 * Phi - eta.up(1, 1) * phi * Phi_x;

  ObservableForm out;
  out.F = DiffForm(dw.chart(), 1);
  out.F.add_term({dw.ix(1)}, A0);         // omega_0 = +dx^1
  out.F.add_term({dw.ix(0)}, -1.0 * A1);  // omega_1 = -dx^0

  // xi = eta^{mu nu} d_nu Phi d/dp^mu - (phi box Phi + p^mu d_mu Phi) d/de + Phi d/dphi
  ScalarField box_leaf = ScalarField::opaque(dim, [f = phi1.box, it = dw.ix(0),
                                                   ix = dw.ix(1)](const Vec& p) {
    return f(p[it], p[ix]);
  });
  std::vector<ScalarField> xi(dim, ScalarField::constant(dim, 0.0));
  xi[dw.iy(1)] = Phi;
  xi[dw.ip(0, 1)] = eta.up(0, 0) * Phi_t;
  xi[dw.ip(1, 1)] = eta.up(1, 1) * Phi_x;
  xi[dw.ie()] = -1.0 * (phi * box_leaf + p0 * Phi_t + p1 * Phi_x);
  out.xi = std::move(xi);
  out.classification = ObservableClass::algebraic;
  return out;
}

ClassificationResult classify_dynamical(double m, double lambda, const MetricSignature& eta,
                                        const DynamicalCandidate& cand,
                                        const std::vector<std::array<double, 3>>& samples,
                                        double tol) {
  ClassificationResult out;
  for (const auto& [t, x, phi] : samples) {
    double divp = cand.divP[0](t, x) + cand.divP[1](t, x);
    out.res_compatibility =
        std::max(out.res_compatibility, std::abs(cand.dE_dphi(t, x, phi) - divp));

    double r_phi = std::abs(cand.dPhi_dphi(t, x, phi));
    // P^mu = eta^{mu nu} d_nu Phi, with d_0 = d_t, d_1 = d_x
    double r_p0 = std::abs(cand.P[0](t, x) - eta.up(0, 0) * cand.Phi.ft(t, x));
    double r_p1 = std::abs(cand.P[1](t, x) - eta.up(1, 1) * cand.Phi.fx(t, x));
    out.res_phi_and_p = std::max({out.res_phi_and_p, r_phi, r_p0, r_p1});

    double closure = (m * m * phi + lambda * phi * phi) * cand.Phi.f(t, x) - cand.E(t, x, phi);
    out.res_closure = std::max(out.res_closure, std::abs(closure));
  }
  if (out.res_phi_and_p > tol)
    out.first_failed = "phi-and-p";
  else if (out.res_compatibility > tol)
    out.first_failed = "compatibility";
  else if (out.res_closure > tol)
    out.first_failed = "closure";
  out.dynamical = out.first_failed.empty();
  return out;
}

LatticeGreen::LatticeGreen(double m, const Lattice1p1& lat) : m_(m), lat_(lat) {
  if (m < 0.0) throw std::invalid_argument("LatticeGreen: mass must be nonnegative");
}

Grid2 LatticeGreen::response(int ts, int xs) const {
  Grid2 g(lat_.nt, lat_.nx, 0.0);
  sweep_response(m_, lat_, ts, xs, [&](int t, const std::vector<double>& row) {
    for (int j = 0; j < lat_.nx; ++j) g.at(t, j) = row[j];
  });
  return g;
}

std::vector<std::vector<double>> LatticeGreen::response_rows(int ts, int xs,
                                                             const std::vector<int>& t_levels) const {
  std::vector<std::vector<double>> rows(t_levels.size(), std::vector<double>(lat_.nx, 0.0));
  sweep_response(m_, lat_, ts, xs, [&](int t, const std::vector<double>& row) {
    for (size_t k = 0; k < t_levels.size(); ++k)
      if (t_levels[k] == t) rows[k] = row;
  });
  return rows;
}

Kernel2::Kernel2(const Grid2& phi1, double m, const Lattice1p1& lat, int t0)
    : phi1_(phi1), m_(m), lat_(lat), t0_(t0) {
  if (t0 < 0 || t0 >= lat.nt - 1) throw SliceOutOfRange("Kernel2: t0 outside the lattice");
  if (phi1.nt() != lat.nt || phi1.nx() != lat.nx)
    throw std::invalid_argument("Kernel2: kernel grid does not match the lattice");
}

std::vector<double> Kernel2::values(const std::vector<std::pair<Site, Site>>& pairs) const {
  std::vector<Accum> acc(pairs.size());
  const double cell = lat_.dt * lat_.dx;
  std::vector<double> g(lat_.nt * lat_.nx);
  for (int ts = t0_ + 1; ts + 1 < lat_.nt; ++ts) {
    for (int xs = 0; xs < lat_.nx; ++xs) {
      sweep_response(m_, lat_, ts, xs, [&](int t, const std::vector<double>& row) {
        for (int j = 0; j < lat_.nx; ++j) g[t * lat_.nx + j] = row[j];
      });
      const double w = -phi1_.at(ts, xs) * cell;
      for (size_t k = 0; k < pairs.size(); ++k) {
        const auto& [a, b] = pairs[k];
        // product grouped so that swapping the arguments is bit-exact
        acc[k].add(w * (g[a.it * lat_.nx + a.ix] * g[b.it * lat_.nx + b.ix]));
      }
    }
  }
  std::vector<double> out(pairs.size());
  for (size_t k = 0; k < pairs.size(); ++k) out[k] = acc[k].get();
  return out;
}

double Kernel2::value(Site a, Site b) const { return values({{a, b}})[0]; }

F2Tensor build_F2(Kernel2 kernel) { return F2Tensor{std::move(kernel)}; }

double slice_pairing(const HamiltonianCurve& curve, const Grid2& f, int it) {
  const Lattice1p1& lat = curve.lattice;
  if (it < 0 || it + 1 >= lat.nt)
    throw SliceOutOfRange("slice_pairing: level " + std::to_string(it) + " needs a successor row");
  Accum a;
  for (int j = 0; j < lat.nx; ++j) {
    double dphi = (curve.phi.at(it + 1, j) - curve.phi.at(it, j)) / lat.dt;
    double df = (f.at(it + 1, j) - f.at(it, j)) / lat.dt;
    a.add((-dphi * f.at(it, j) + curve.phi.at(it, j) * df) * lat.dx);
  }
  return a.get();
}

double eval_boundary_F1(const HamiltonianCurve& curve, const Grid2& phi1, const Slab& slab) {
  return slice_pairing(curve, phi1, slab.it1) - slice_pairing(curve, phi1, slab.it0);
}

std::array<double, 4> boundary_F2_terms(const HamiltonianCurve& curve, const F2Tensor& f2,
                                        const Slab& slab) {
  const Kernel2& k2 = f2.kernel;
  const Lattice1p1& lat = k2.lattice();
  if (slab.it1 + 1 >= lat.nt || slab.it0 < 0 || slab.it0 >= slab.it1)
    throw SliceOutOfRange("boundary_F2_terms: slab outside the lattice");
  const double cell = lat.dt * lat.dx;

  Accum s11, s10, s01, s00;
  std::vector<double> row_t0(lat.nx), row_t0p(lat.nx), row_t1(lat.nx), row_t1p(lat.nx);
  for (int ts = k2.t0() + 1; ts + 1 < lat.nt; ++ts) {
    if (ts > slab.it1) break;  // later sources cannot reach either slice
    for (int xs = 0; xs < lat.nx; ++xs) {
      sweep_response(k2.mass(), lat, ts, xs, [&](int t, const std::vector<double>& row) {
        if (t == slab.it0) row_t0 = row;
        if (t == slab.it0 + 1) row_t0p = row;
        if (t == slab.it1) row_t1 = row;
        if (t == slab.it1 + 1) row_t1p = row;
      });
      const double w = -k2.phi1().at(ts, xs) * cell;
      const double a0 = pair_rows(curve, row_t0, row_t0p, slab.it0);
      const double a1 = pair_rows(curve, row_t1, row_t1p, slab.it1);
      s11.add(w * a1 * a1);
      s10.add(w * a1 * a0);
      s01.add(w * a0 * a1);
      s00.add(w * a0 * a0);
    }
  }
  return {s11.get(), s10.get(), s01.get(), s00.get()};
}

double eval_boundary_F2(const HamiltonianCurve& curve, const F2Tensor& f2, const Slab& slab) {
  auto t = boundary_F2_terms(curve, f2, slab);
  return t[0] - t[1] - t[2] + t[3];
}

double slab_volume_obstruction(const HamiltonianCurve& curve, const Grid2& phi1,
                               const Slab& slab) {
  const Lattice1p1& lat = curve.lattice;
  Accum a;
  for (int it = slab.it0 + 1; it <= slab.it1; ++it)
    for (int j = 0; j < lat.nx; ++j) {
      double f = curve.phi.at(it, j);
      a.add(f * f * phi1.at(it, j) * lat.dt * lat.dx);
    }
  return curve.lambda * a.get();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] == 0.0) continue;
    double lx = std::log10(x[i]), ly = std::log10(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("loglog_slope: need at least two usable points");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ScalingReport lambda_scaling_study(const ScalingConfig& config) {
  ScalingReport report;
  Kernel2 base_kernel(config.phi1, config.m, config.lattice, config.slab.it0);
  F2Tensor f2 = build_F2(base_kernel);

  report.rows.resize(config.lambdas.size());
  parallel_for(0, static_cast<int>(config.lambdas.size()), [&](int i) {
    const double lambda = config.lambdas[i];
    Grid2 phi = evolve_scalar(config.phi0, config.phidot0, config.m, lambda, config.lattice);
    HamiltonianCurve curve = lift_to_curve(phi, config.m, lambda, 0.0, config.lattice);
    ScalingRow row;
    row.lambda = lambda;
    row.r1 = eval_boundary_F1(curve, config.phi1, config.slab);
    row.r2 = row.r1 + lambda * eval_boundary_F2(curve, f2, config.slab);
    report.rows[i] = row;
  });

  std::vector<double> xs, r1s, r2s;
  for (const auto& row : report.rows)
    if (row.lambda > 0.0) {
      xs.push_back(row.lambda);
      r1s.push_back(row.r1);
      r2s.push_back(row.r2);
    }
  if (xs.size() >= 2) {
    report.slope_r1 = loglog_slope(xs, r1s);
    report.slope_r2 = loglog_slope(xs, r2s);
    report.slopes_defined = true;
  }
  return report;
}

double PerturbativeFunctional::eval(const HamiltonianCurve& curve) const {
  double total = c0;
  for (const auto& k1 : first_order) total += eval_boundary_F1(curve, k1, slab);
  for (const auto& k2 : second_order) total += eval_boundary_F2(curve, *k2, slab);
  for (const auto& [f, g] : product_pairs)
    total += eval_boundary_F1(curve, f, slab) * eval_boundary_F1(curve, g, slab);
  return total;
}

PerturbativeFunctional PerturbativeFunctional::zero(const Slab& slab) {
  PerturbativeFunctional z;
  z.c0 = 0.0;
  z.slab = slab;
  return z;
}

PerturbativeFunctional product_functionals(const PerturbativeFunctional& A,
                                           const PerturbativeFunctional& B) {
  if (A.slab.it0 != B.slab.it0 || A.slab.it1 != B.slab.it1)
    throw std::invalid_argument("product_functionals: slabs differ");
  PerturbativeFunctional out;
  out.c0 = A.c0 * B.c0;
  out.slab = A.slab;

  auto scale_grid = [](const Grid2& g, double w) {
    Grid2 out_g = g;
    for (double& v : out_g.data()) v *= w;
    return out_g;
  };

  // order one: A0 (x) B1 + A1 (x) B0
  for (const auto& k : B.first_order)
    if (A.c0 != 0.0) out.first_order.push_back(scale_grid(k, A.c0));
  for (const auto& k : A.first_order)
    if (B.c0 != 0.0) out.first_order.push_back(scale_grid(k, B.c0));

  // order two: A0 (x) B2 + A1 (x) B1 + A2 (x) B0; anything higher is truncated
  auto scale_f2 = [&](const std::shared_ptr<const F2Tensor>& k, double w) {
    if (w == 1.0) return k;
    return std::make_shared<const F2Tensor>(build_F2(Kernel2(
        scale_grid(k->kernel.phi1(), w), k->kernel.mass(), k->kernel.lattice(), k->kernel.t0())));
  };
  if (A.c0 != 0.0)
    for (const auto& k : B.second_order) out.second_order.push_back(scale_f2(k, A.c0));
  if (B.c0 != 0.0)
    for (const auto& k : A.second_order) out.second_order.push_back(scale_f2(k, B.c0));
  for (const auto& f : A.first_order)
    for (const auto& g : B.first_order) out.product_pairs.emplace_back(f, g);

  // pre-existing product pairs are order two already; scalars pass through
  for (const auto& [f, g] : A.product_pairs)
    if (B.c0 != 0.0) out.product_pairs.emplace_back(scale_grid(f, B.c0), g);
  for (const auto& [f, g] : B.product_pairs)
    if (A.c0 != 0.0) out.product_pairs.emplace_back(scale_grid(f, A.c0), g);

  return out;
}

}  // namespace multisym
