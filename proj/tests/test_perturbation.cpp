#include <cmath>

#include "doctest.h"
#include "multisym/perturbation.hpp"
#include "test_support.hpp"

using namespace multisym;

namespace {

constexpr double kPi = 3.14159265358979323846;

Lattice1p1 study_lattice(int nx, int nt) {
  double L = 4.0 * kPi;
  double dx = L / nx;
  return Lattice1p1(nt, nx, dx / 2, dx);
}

Grid2 discrete_free_wave(const Lattice1p1& lat, double m, double k, double amp) {
  double omega = std::sqrt(k * k + m * m);
  std::vector<double> f0(lat.nx), df0(lat.nx);
  for (int j = 0; j < lat.nx; ++j) {
    f0[j] = amp * std::sin(k * lat.x(j));
    df0[j] = amp * omega * std::cos(k * lat.x(j));
  }
  return evolve_scalar(f0, df0, m, 0.0, lat);
}

std::vector<double> gaussian_bump(const Lattice1p1& lat, double amp) {
  std::vector<double> v(lat.nx);
  double L = lat.length(), s = L / 16.0;
  for (int j = 0; j < lat.nx; ++j) {
    double d = lat.x(j) - 0.5 * L;
    v[j] = amp * std::exp(-0.5 * d * d / (s * s));
  }
  return v;
}

// discrete wave operator + m^2 applied in one argument of a sampled kernel
double apply_op(const std::function<double(int, int)>& f, int it, int ix, double m,
                const Lattice1p1& lat) {
  double dtt = (f(it + 1, ix) - 2.0 * f(it, ix) + f(it - 1, ix)) / (lat.dt * lat.dt);
  double dxx = (f(it, lat.wrap(ix + 1)) - 2.0 * f(it, ix) + f(it, lat.wrap(ix - 1))) /
               (lat.dx * lat.dx);
  return dtt - dxx + m * m * f(it, ix);
}

}  // namespace

TEST_CASE("dynamical-observable classification reproduces the coupling dichotomy") {
  const double m = 1.2;
  MetricSignature eta = MetricSignature::minkowski_1p1();
  const double k = 0.7, w = std::sqrt(k * k + m * m);
  SpacetimeField Phi = SpacetimeField::plane_wave(0.9, k, w, 0.2);

  DynamicalCandidate cand;
  cand.Phi = Phi;
  cand.E = [Phi, m](double t, double x, double phi) { return m * m * phi * Phi.f(t, x); };
  cand.dE_dphi = [Phi, m](double t, double x, double) { return m * m * Phi.f(t, x); };
  cand.dPhi_dphi = [](double, double, double) { return 0.0; };
  cand.P[0] = [Phi, eta](double t, double x) { return eta.up(0, 0) * Phi.ft(t, x); };
  cand.P[1] = [Phi, eta](double t, double x) { return eta.up(1, 1) * Phi.fx(t, x); };
  cand.divP[0] = [Phi, eta](double t, double x) { return eta.up(0, 0) * Phi.ftt(t, x); };
  cand.divP[1] = [Phi, eta](double t, double x) { return eta.up(1, 1) * Phi.fxx(t, x); };

  std::vector<std::array<double, 3>> samples;
  auto g = test::rng(89);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int s = 0; s < 50; ++s) samples.push_back({u(g), u(g), u(g)});

  ClassificationResult free_case = classify_dynamical(m, 0.0, eta, cand, samples);
  CHECK(free_case.dynamical);
  CHECK(free_case.res_compatibility <= 1e-10);
  CHECK(free_case.res_closure <= 1e-10);

  const double lambda = 0.4;
  ClassificationResult coupled = classify_dynamical(m, lambda, eta, cand, samples);
  CHECK_FALSE(coupled.dynamical);
  CHECK(coupled.first_failed == "closure");
  double expected = 0.0;
  for (const auto& [t, x, phi] : samples)
    expected = std::max(expected, std::abs(lambda * phi * phi * Phi.f(t, x)));
  CHECK(coupled.res_closure == doctest::Approx(expected).epsilon(1e-12));

  // a kernel depending on the field value fails the first equations
  DynamicalCandidate bad = cand;
  bad.dPhi_dphi = [](double, double, double) { return 0.3; };
  ClassificationResult r = classify_dynamical(m, 0.0, eta, bad, samples);
  CHECK_FALSE(r.dynamical);
  CHECK(r.first_failed == "phi-and-p");
}

TEST_CASE("impulse responses: exact discrete identity, causal support, massless cone") {
  Lattice1p1 lat = study_lattice(48, 96);
  const double m = 1.0;
  LatticeGreen green(m, lat);

  const int ts = 10, xs = 7;
  Grid2 g = green.response(ts, xs);

  // retardation: nothing at or before the source time
  for (int it = 0; it <= ts; ++it)
    for (int j = 0; j < lat.nx; ++j) CHECK(g.at(it, j) == 0.0);

  // (D_tt - D_xx + m^2) G = delta/(dt dx) at every interior site
  double cell = lat.dt * lat.dx;
  double worst = 0.0;
  for (int it = 1; it + 1 < lat.nt; ++it)
    for (int j = 0; j < lat.nx; ++j) {
      double lhs = apply_op([&](int a, int b) { return g.at(a, b); }, it, j, m, lat);
      double rhs = (it == ts && j == xs) ? 1.0 / cell : 0.0;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  CHECK(worst <= 1e-10);

  // row capture matches the full sweep
  auto rows = green.response_rows(ts, xs, {ts + 3, ts + 7});
  for (int j = 0; j < lat.nx; ++j) {
    CHECK(rows[0][j] == g.at(ts + 3, j));
    CHECK(rows[1][j] == g.at(ts + 7, j));
  }

  // massless response approaches the half-indicator of the forward cone
  auto cone_l1 = [&](int nx) {
    Lattice1p1 l = study_lattice(nx, nx);
    LatticeGreen gr(0.0, l);
    int src_t = 2, src_x = nx / 2;
    Grid2 resp = gr.response(src_t, src_x);
    double err = 0.0;
    int t_max = std::min(l.nt - 1, src_t + nx / 3);  // stay clear of the wrap
    for (int it = src_t + 1; it <= t_max; ++it)
      for (int j = 0; j < l.nx; ++j) {
        double dt_phys = l.t(it) - l.t(src_t);
        double dx_phys = std::abs(l.x(j) - l.x(src_x));
        dx_phys = std::min(dx_phys, l.length() - dx_phys);
        double exact = (dx_phys < dt_phys) ? 0.5 : 0.0;
        err += std::abs(resp.at(it, j) - exact) * l.dt * l.dx;
      }
    return err;
  };
  double e1 = cone_l1(48), e2 = cone_l1(96);
  CHECK(e2 < e1);
  CHECK(e1 / e2 > 1.25);  // the dispersive front layer shrinks under refinement

  // deep inside the cone the response averages to the half-indicator value
  {
    int nx = 96;
    Lattice1p1 l = study_lattice(nx, nx);
    Grid2 resp = LatticeGreen(0.0, l).response(2, nx / 2);
    double mean = 0.0;
    int count = 0;
    for (int it = 2 + nx / 4; it <= 2 + nx / 3; ++it)
      for (int j = 0; j < l.nx; ++j) {
        double dt_phys = l.t(it) - l.t(2);
        double dx_phys = std::abs(l.x(j) - l.x(nx / 2));
        dx_phys = std::min(dx_phys, l.length() - dx_phys);
        if (dx_phys < 0.6 * dt_phys) {
          mean += resp.at(it, j);
          ++count;
        }
      }
    mean /= count;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
  }
}

TEST_CASE("second-order kernel: symmetry, vanishing start data, factorized identity") {
  Lattice1p1 lat = study_lattice(48, 96);
  const double m = 1.0;
  const int t0 = 8;
  Grid2 phi1 = discrete_free_wave(lat, m, 0.5, 1.0);
  Kernel2 kernel(phi1, m, lat, t0);

  // zero kernel from zero source data
  Kernel2 zero_kernel(Grid2(lat.nt, lat.nx, 0.0), m, lat, t0);
  CHECK(zero_kernel.value({20, 5}, {30, 11}) == 0.0);

  auto g = test::rng(97);
  std::uniform_int_distribution<int> pick_t(t0 + 4, lat.nt - 4), pick_x(0, lat.nx - 1);

  // symmetry is exact: the summand is symmetric term by term
  std::vector<std::pair<Kernel2::Site, Kernel2::Site>> sym_pairs;
  for (int s = 0; s < 4; ++s) {
    Kernel2::Site a{pick_t(g), pick_x(g)}, b{pick_t(g), pick_x(g)};
    sym_pairs.push_back({a, b});
    sym_pairs.push_back({b, a});
  }
  auto sym_vals = kernel.values(sym_pairs);
  for (size_t s = 0; s < sym_vals.size(); s += 2) CHECK(sym_vals[s] == sym_vals[s + 1]);

  // vanishing through the start slice: zero value and zero time derivative
  std::vector<std::pair<Kernel2::Site, Kernel2::Site>> start_pairs;
  for (int s = 0; s < 6; ++s) {
    int jb = pick_x(g), tb = pick_t(g);
    for (int dt_off : {-1, 0, 1})
      start_pairs.push_back({{t0 + dt_off, pick_x(g)}, {tb, jb}});
  }
  for (double v : kernel.values(start_pairs)) CHECK(std::abs(v) <= 1e-10);

  // causality: both arguments ahead of every admissible source
  CHECK(kernel.value({t0 + 1, 3}, {lat.nt - 3, 9}) == 0.0);

  // bi-operator identity against the contact term, on and off the diagonal
  struct Probe {
    Kernel2::Site a, b;
  };
  std::vector<Probe> probes;
  for (int s = 0; s < 5; ++s) {
    int it = pick_t(g), jx = pick_x(g);
    probes.push_back({{it, jx}, {it, jx}});                        // diagonal
    probes.push_back({{it, jx}, {pick_t(g), pick_x(g)}});          // generic
  }
  for (const Probe& pr : probes) {
    // collect the 5x5 stencil neighborhood per slot
    std::vector<std::pair<Kernel2::Site, Kernel2::Site>> need;
    auto offsets = std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (auto [da, wa] : offsets)
      for (auto [db, wb] : offsets)
        need.push_back({{pr.a.it + da, lat.wrap(pr.a.ix + wa)},
                        {pr.b.it + db, lat.wrap(pr.b.ix + wb)}});
    auto vals = kernel.values(need);
    auto value_at = [&](int ia, int ja, int ib, int jb) {
      for (size_t q = 0; q < need.size(); ++q)
        if (need[q].first.it == ia && need[q].first.ix == ja && need[q].second.it == ib &&
            need[q].second.ix == jb)
          return vals[q];
      REQUIRE(false);
      return 0.0;
    };
    // (D1 + m^2)(D2 + m^2) Phi2 at the probe
    auto op2 = [&](int ib, int jb) {
      return apply_op(
          [&](int ia, int ja) { return value_at(ia, lat.wrap(ja), ib, jb); }, pr.a.it, pr.a.ix,
          m, lat);
    };
    double biop = apply_op([&](int ib, int jb) { return op2(ib, lat.wrap(jb)); }, pr.b.it,
                           pr.b.ix, m, lat);
    double contact = (pr.a.it == pr.b.it && pr.a.ix == pr.b.ix)
                         ? -phi1.at(pr.a.it, pr.a.ix) / (lat.dt * lat.dx)
                         : 0.0;
    CHECK(std::abs(biop - contact) <= 1e-8);
  }
}

TEST_CASE("slab bookkeeping: boundary pairings, volume transport, vanishing corner terms") {
  Lattice1p1 lat = study_lattice(48, 96);
  const double m = 1.0;
  Slab slab{8, lat.nt - 8};
  Grid2 phi1 = discrete_free_wave(lat, m, 0.5, 1.0);

  const double lambda = 0.02;
  Grid2 phi = evolve_scalar(gaussian_bump(lat, 0.4), std::vector<double>(lat.nx, 0.0), m,
                            lambda, lat);
  HamiltonianCurve curve = lift_to_curve(phi, m, lambda, 0.0, lat);

  // boundary functional of the first-order form = coupling * slab volume sum
  double r1 = eval_boundary_F1(curve, phi1, slab);
  double vol = slab_volume_obstruction(curve, phi1, slab);
  CHECK(std::abs(r1) > 1e-6);
  CHECK(r1 == doctest::Approx(vol).epsilon(1e-10));

  // free curve: the pairing is a constant of the motion
  Grid2 phi_free = evolve_scalar(gaussian_bump(lat, 0.4), std::vector<double>(lat.nx, 0.0), m,
                                 0.0, lat);
  HamiltonianCurve curve_free = lift_to_curve(phi_free, m, 0.0, 0.0, lat);
  CHECK(std::abs(eval_boundary_F1(curve_free, phi1, slab)) <= 1e-13);

  // tensor boundary: zero kernel gives zero, start-slice terms vanish
  F2Tensor f2 = build_F2(Kernel2(phi1, m, lat, slab.it0));
  F2Tensor f2_zero = build_F2(Kernel2(Grid2(lat.nt, lat.nx, 0.0), m, lat, slab.it0));
  CHECK(eval_boundary_F2(curve, f2_zero, slab) == 0.0);

  auto terms = boundary_F2_terms(curve, f2, slab);
  CHECK(std::abs(terms[0]) > 1e-8);       // the live double-slice term
  CHECK(std::abs(terms[1]) <= 1e-10);
  CHECK(std::abs(terms[2]) <= 1e-10);
  CHECK(std::abs(terms[3]) <= 1e-10);

  // corrected functional drops to second order in the coupling
  auto r2_at = [&](double lam) {
    Grid2 p = evolve_scalar(gaussian_bump(lat, 0.4), std::vector<double>(lat.nx, 0.0), m, lam,
                            lat);
    HamiltonianCurve c = lift_to_curve(p, m, lam, 0.0, lat);
    return eval_boundary_F1(c, phi1, slab) + lam * eval_boundary_F2(c, f2, slab);
  };
  double r2a = r2_at(0.04), r2b = r2_at(0.02);
  CHECK(std::abs(r2a) > 1e-12);
  CHECK(r2a / r2b == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("coupling-scaling study fits the predicted slopes") {
  ScalingConfig config;
  config.lattice = study_lattice(48, 96);
  config.m = 1.0;
  config.slab = {8, config.lattice.nt - 8};
  config.phi0 = gaussian_bump(config.lattice, 0.4);
  config.phidot0 = std::vector<double>(config.lattice.nx, 0.0);
  config.phi1 = discrete_free_wave(config.lattice, config.m, 0.5, 1.0);
  for (int i = 0; i < 6; ++i)
    config.lambdas.push_back(1e-3 * std::pow(100.0, i / 5.0));

  ScalingReport report = lambda_scaling_study(config);
  REQUIRE(report.slopes_defined);
  CHECK(report.slope_r1 == doctest::Approx(1.0).epsilon(0.1));
  CHECK(report.slope_r2 == doctest::Approx(2.0).epsilon(0.1));
  for (const auto& row : report.rows) CHECK(std::abs(row.r2) < std::abs(row.r1));

  // the degenerate grid {0} reports no slopes, just conservation
  ScalingConfig zero_cfg = config;
  zero_cfg.lambdas = {0.0};
  ScalingReport zr = lambda_scaling_study(zero_cfg);
  CHECK_FALSE(zr.slopes_defined);
  CHECK(std::abs(zr.rows[0].r1) <= 1e-13);
}

TEST_CASE("functional product: unit, zero, homomorphism, commutativity") {
  Lattice1p1 lat = study_lattice(48, 96);
  const double m = 1.0, lambda = 0.05;
  Slab slab{8, lat.nt - 8};

  Grid2 phi = evolve_scalar(gaussian_bump(lat, 0.4), std::vector<double>(lat.nx, 0.0), m,
                            lambda, lat);
  HamiltonianCurve curve = lift_to_curve(phi, m, lambda, 0.0, lat);

  auto make_series = [&](double k_mode, double amp) {
    PerturbativeFunctional f;
    f.slab = slab;
    Grid2 phi1 = discrete_free_wave(lat, m, k_mode, amp);
    f.first_order.push_back(phi1);
    Grid2 weighted = phi1;
    for (double& v : weighted.data()) v *= lambda;
    f.second_order.push_back(
        std::make_shared<const F2Tensor>(build_F2(Kernel2(weighted, m, lat, slab.it0))));
    return f;
  };
  PerturbativeFunctional A = make_series(0.5, 1.0);
  PerturbativeFunctional B = make_series(1.0, 0.7);

  // zero annihilates
  PerturbativeFunctional Z = PerturbativeFunctional::zero(slab);
  PerturbativeFunctional AZ = product_functionals(A, Z);
  CHECK(AZ.eval(curve) == 0.0);

  // evaluation homomorphism at the truncation order
  double ea = A.eval(curve), eb = B.eval(curve);
  PerturbativeFunctional AB = product_functionals(A, B);
  double defect = std::abs(AB.eval(curve) - ea * eb);
  CHECK(defect < 10.0 * lambda * lambda);
  CHECK(defect < 0.01 * std::abs(ea * eb));

  // commutativity of evaluation
  PerturbativeFunctional BA = product_functionals(B, A);
  CHECK(AB.eval(curve) == doctest::Approx(BA.eval(curve)).epsilon(1e-13));
}
