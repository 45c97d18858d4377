#include <cmath>

#include "doctest.h"
#include "multisym/dynamics.hpp"
#include "test_support.hpp"

using namespace multisym;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> sample(const Lattice1p1& lat, const std::function<double(double)>& f) {
  std::vector<double> v(lat.nx);
  for (int j = 0; j < lat.nx; ++j) v[j] = f(lat.x(j));
  return v;
}

// smooth periodic profile with nonvanishing derivatives of all orders
double bump(double x, double L) { return std::exp(std::cos(kTwoPi * x / L)) / 3.0; }
double bump_prime(double x, double L) {
  return -kTwoPi / L * std::sin(kTwoPi * x / L) * std::exp(std::cos(kTwoPi * x / L)) / 3.0;
}

double energy_slice(const Grid2& phi, int it, double m, double lambda, const Lattice1p1& lat) {
  double total = 0.0;
  for (int j = 0; j < lat.nx; ++j) {
    double ft = (phi.at(it + 1, j) - phi.at(it - 1, j)) / (2 * lat.dt);
    double fx = (phi.at(it, lat.wrap(j + 1)) - phi.at(it, lat.wrap(j - 1))) / (2 * lat.dx);
    double f = phi.at(it, j);
    total += (0.5 * ft * ft + 0.5 * fx * fx + 0.5 * m * m * f * f + lambda / 3.0 * f * f * f) *
             lat.dx;
  }
  return total;
}

}  // namespace

TEST_CASE("lattice invariants") {
  CHECK_THROWS_AS(Lattice1p1(100, 64, 0.2, 0.1), CFLViolation);
  CHECK_THROWS_AS(Lattice1p1(100, 4, 0.05, 0.1), std::invalid_argument);
  Lattice1p1 lat(10, 16, 0.05, 0.1, 2.0);
  CHECK(lat.t(3) == doctest::Approx(2.15));
  CHECK(lat.wrap(-1) == 15);
}

TEST_CASE("free transport: right-moving profile with second-order error") {
  const double L = 1.0;
  auto run = [&](int nx) {
    double dx = L / nx;
    double dt = dx / 2;
    int nt = static_cast<int>(std::round(0.5 / dt)) + 1;
    Lattice1p1 lat(nt, nx, dt, dx);
    auto phi0 = sample(lat, [&](double x) { return bump(x, L); });
    auto phidot0 = sample(lat, [&](double x) { return -bump_prime(x, L); });
    Grid2 phi = evolve_scalar(phi0, phidot0, 0.0, 0.0, lat);
    double T = lat.t(nt - 1);
    double err = 0.0;
    for (int j = 0; j < nx; ++j) {
      double exact = bump(std::fmod(lat.x(j) - T + 10 * L, L), L);
      err = std::max(err, std::abs(phi.at(nt - 1, j) - exact));
    }
    return err;
  };
  double e1 = run(128), e2 = run(256);
  CHECK(e1 < 2e-3);
  CHECK(e1 / e2 > 2.5);  // ~4x per refinement
}

TEST_CASE("massive standing wave has the dispersion-relation period") {
  const double L = kTwoPi;
  const int nx = 256;
  const double dx = L / nx, dt = dx / 2;
  const double k = 1.0, m = 1.0;
  const double omega = std::sqrt(k * k + m * m);
  const int nt = static_cast<int>(std::round(10.0 / dt));
  Lattice1p1 lat(nt, nx, dt, dx);
  auto phi0 = sample(lat, [&](double x) { return std::cos(k * x); });
  Grid2 phi = evolve_scalar(phi0, std::vector<double>(nx, 0.0), m, 0.0, lat);

  // project on the cos(kx) mode and time the sign changes
  std::vector<double> amp(nt);
  for (int it = 0; it < nt; ++it) {
    double a = 0.0;
    for (int j = 0; j < nx; ++j) a += phi.at(it, j) * std::cos(k * lat.x(j));
    amp[it] = a * 2.0 / nx;
  }
  std::vector<double> crossings;
  for (int it = 0; it + 1 < nt; ++it)
    if (amp[it] * amp[it + 1] < 0.0) {
      double frac = amp[it] / (amp[it] - amp[it + 1]);
      crossings.push_back(lat.t(it) + frac * dt);
    }
  REQUIRE(crossings.size() >= 3);
  double period = 2.0 * (crossings[1] - crossings[0]);
  CHECK(std::abs(period - kTwoPi / omega) / (kTwoPi / omega) < 0.01);
}

TEST_CASE("near-conservation of the interacting energy over 400 steps") {
  const double L = kTwoPi;
  auto drift = [&](int nx) {
    double dx = L / nx, dt = 0.5 * dx;
    int steps = 400 * nx / 128;
    Lattice1p1 lat(steps + 2, nx, dt, dx);
    auto phi0 = sample(lat, [&](double x) { return 0.3 * std::exp(std::cos(x) - 1.0); });
    Grid2 phi = evolve_scalar(phi0, std::vector<double>(nx, 0.0), 1.0, 0.3, lat);
    double e0 = energy_slice(phi, 1, 1.0, 0.3, lat);
    double worst = 0.0;
    for (int it = 2; it + 1 < lat.nt; ++it)
      worst = std::max(worst, std::abs(energy_slice(phi, it, 1.0, 0.3, lat) - e0) / std::abs(e0));
    return worst;
  };
  double base = drift(128);
  CHECK(base < 1e-3);
  CHECK(drift(256) < base);  // reference run on the finer grid drifts less
}

TEST_CASE("blow-up and bad input detection") {
  Lattice1p1 lat(200, 16, 0.05, 0.1);
  std::vector<double> huge(16, 3e5), zero(16, 0.0);
  CHECK_THROWS_AS(evolve_scalar(huge, zero, 0.0, 50.0, lat), NonFiniteField);
  std::vector<double> nan0(16, std::nan(""));
  CHECK_THROWS_AS(evolve_scalar(nan0, zero, 1.0, 0.0, lat), NonFiniteField);
  CHECK_THROWS_AS(evolve_scalar(std::vector<double>(8, 0.0), zero, 1.0, 0.0, lat),
                  std::invalid_argument);
}

TEST_CASE("determinism: identical inputs give bit-identical arrays") {
  Lattice1p1 lat(60, 32, 0.05, 0.1);
  auto phi0 = sample(lat, [&](double x) { return std::sin(kTwoPi * x / lat.length()); });
  std::vector<double> v0(32, 0.1);
  Grid2 a = evolve_scalar(phi0, v0, 1.0, 0.2, lat);
  Grid2 b = evolve_scalar(phi0, v0, 1.0, 0.2, lat);
  CHECK(a.data() == b.data());
}

TEST_CASE("lift: constants, plane-wave energy coordinate, exact constancy") {
  const double L = kTwoPi;
  const int nx = 64;
  Lattice1p1 lat(40, nx, L / nx / 2, L / nx);

  Grid2 zero(lat.nt, lat.nx, 0.0);
  HamiltonianCurve flat = lift_to_curve(zero, 1.0, 0.0, 0.25, lat);
  for (int it = 0; it < lat.nt; ++it)
    for (int j = 0; j < nx; ++j) {
      CHECK(flat.p0.at(it, j) == 0.0);
      CHECK(flat.p1.at(it, j) == 0.0);
      CHECK(flat.e.at(it, j) == doctest::Approx(0.25));
    }

  const double k = 1.0, m = 1.0;
  const double omega = std::sqrt(k * k + m * m);
  Grid2 wave(lat.nt, lat.nx);
  for (int it = 0; it < lat.nt; ++it)
    for (int j = 0; j < nx; ++j)
      wave.at(it, j) = 0.5 * std::cos(k * lat.x(j)) * std::cos(omega * lat.t(it));
  HamiltonianCurve c = lift_to_curve(wave, m, 0.0, 0.0, lat);

  double worst = 0.0;
  for (int it = 1; it + 1 < lat.nt; ++it)
    for (int j = 0; j < nx; ++j) {
      double f = wave.at(it, j);
      double ft = -0.5 * omega * std::cos(k * lat.x(j)) * std::sin(omega * lat.t(it));
      double fx = -0.5 * k * std::sin(k * lat.x(j)) * std::cos(omega * lat.t(it));
      double e_exact = 0.5 * (ft * ft - fx * fx) + 0.5 * m * m * f * f;
      worst = std::max(worst, std::abs(c.e.at(it, j) - e_exact));
    }
  CHECK(worst < 5e-3);  // O(dx^2) against the analytic expression

  // site-wise constancy of the scalar Hamiltonian holds by construction
  for (int it = 0; it < lat.nt; ++it)
    for (int j = 0; j < nx; ++j) {
      double f = c.phi.at(it, j), pt = c.p0.at(it, j), px = c.p1.at(it, j);
      double h = c.e.at(it, j) + 0.5 * (-pt * pt + px * px) - 0.5 * m * m * f * f;
      CHECK(std::abs(h - c.H0) < 1e-15);
    }
}

TEST_CASE("flow verification: second-order residual on solutions, O(1) on noise") {
  const double L = kTwoPi;
  const double k = 1.0, m = 1.0;
  MetricSignature eta = MetricSignature::minkowski_1p1();
  DWChart dw(2, 1);
  HamiltonianDensity H = HamiltonianDensity::scalar_cubic(dw, eta, m, 0.0);

  auto residual_at = [&](int nx) {
    double dx = L / nx, dt = dx / 2;
    int nt = nx / 2;
    Lattice1p1 lat(nt, nx, dt, dx);
    auto phi0 = sample(lat, [&](double x) { return 0.5 * std::cos(k * x); });
    Grid2 phi = evolve_scalar(phi0, std::vector<double>(nx, 0.0), m, 0.0, lat);
    HamiltonianCurve c = lift_to_curve(phi, m, 0.0, 0.0, lat);
    return verify_hamilton_flow(c, H, dw);
  };

  double r1 = residual_at(64), r2 = residual_at(128), r3 = residual_at(256);
  double order12 = std::log2(r1 / r2), order23 = std::log2(r2 / r3);
  CHECK(order12 == doctest::Approx(2.0).epsilon(0.15));
  CHECK(order23 == doctest::Approx(2.0).epsilon(0.15));

  // negative control: smooth field with the wrong dispersion
  int nx = 64;
  Lattice1p1 lat(nx / 2, nx, L / nx / 2, L / nx);
  Grid2 junk(lat.nt, lat.nx);
  for (int it = 0; it < lat.nt; ++it)
    for (int j = 0; j < nx; ++j)
      junk.at(it, j) = std::cos(3.0 * lat.x(j)) * std::cos(0.5 * lat.t(it));
  HamiltonianCurve cj = lift_to_curve(junk, m, 0.0, 0.0, lat);
  double r_noise = verify_hamilton_flow(cj, H, dw);
  CHECK(r_noise / r1 > 1e3);
}

TEST_CASE("classical reduction: oscillator accuracy, conservation, flow check") {
  DWChart chart1(1, 1);
  const int dim = chart1.chart().dim();
  ScalarField q = ScalarField::coordinate(dim, chart1.iy(1));
  ScalarField p = ScalarField::coordinate(dim, chart1.ip(0, 1));
  ScalarField e = ScalarField::coordinate(dim, chart1.ie());
  HamiltonianDensity H{chart1.chart(), e + 0.5 * (p * p + q * q)};

  Trajectory traj = classical_reduction(H, chart1, 1.0, 0.0, 10.0, 1e-3);
  double worst_q = 0.0, worst_h = 0.0;
  for (size_t s = 0; s < traj.t.size(); ++s) {
    worst_q = std::max(worst_q, std::abs(traj.q[s] - std::cos(traj.t[s])));
    double h = 0.5 * (traj.p[s] * traj.p[s] + traj.q[s] * traj.q[s]);
    worst_h = std::max(worst_h, std::abs(h - 0.5));
  }
  CHECK(worst_q < 1e-6);
  CHECK(worst_h < 1e-8);  // autonomous: energy conserved along the trajectory

  CHECK(verify_classical_flow(traj, H, chart1) < 1e-4);

  // {H, H} = 0, from the antisymmetric bracket formula
  auto g = test::rng(71);
  for (int t = 0; t < 10; ++t) {
    Vec pt = test::random_point(g, dim);
    double dq = H.density.partial(chart1.iy(1))(pt);
    double dp = H.density.partial(chart1.ip(0, 1))(pt);
    CHECK(dp * dq - dq * dp == 0.0);
  }
}

TEST_CASE("flat-problem solution surfaces pass the flow check exactly") {
  LepageChart22 lp;

  // identity map, r = 1, h = 0: e = 1 and the momenta are the reversed diagonal
  LepageCurve22 c0 =
      lepage_trivial_curve(AnalyticMap22::identity(), AnalyticScalar2::constant(1.0), 0.0, 8, 8);
  for (const auto& pt : c0.points) {
    CHECK(pt[lp.ie()] == doctest::Approx(1.0));
    CHECK(pt[lp.ip(1, 1)] == doctest::Approx(-1.0));
    CHECK(pt[lp.ip(1, 2)] == doctest::Approx(0.0));
    CHECK(pt[lp.ip(2, 1)] == doctest::Approx(0.0));
    CHECK(pt[lp.ip(2, 2)] == doctest::Approx(-1.0));
  }
  CHECK(verify_lepage_flow(c0, lp) < 1e-10);

  // arbitrary cubic map with varying r: any smooth map solves the flat problem
  Eigen::Matrix2d a1;
  a1 << 1.0, 0.2, -0.1, 0.8;
  AnalyticMap22 u = AnalyticMap22::cubic(a1, 0.15);
  AnalyticScalar2 r = AnalyticScalar2::two_plus_sin_x1();
  LepageCurve22 c = lepage_trivial_curve(u, r, 0.4, 16, 16, 2.0, 2.0);
  CHECK(verify_lepage_flow(c, lp) < 1e-8);

  // shifting h moves e uniformly and leaves the residual unchanged
  LepageCurve22 c_shift = lepage_trivial_curve(u, r, 0.4 + 5.0, 16, 16, 2.0, 2.0);
  for (size_t s = 0; s < c.points.size(); ++s)
    CHECK(c_shift.points[s][lp.ie()] - c.points[s][lp.ie()] == doctest::Approx(5.0));
  CHECK(std::abs(verify_lepage_flow(c_shift, lp) - verify_lepage_flow(c, lp)) < 1e-12);

  // vanishing r is rejected
  CHECK_THROWS_AS(
      lepage_trivial_curve(u, AnalyticScalar2::constant(0.0), 0.0, 8, 8), ZeroR);
}
