#include "doctest.h"
#include "multisym/legendre.hpp"
#include "test_support.hpp"

using namespace multisym;
using test::rng;

namespace {

Eigen::Matrix2d random_m22(std::mt19937_64& g, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::Matrix2d m;
  m << u(g), u(g), u(g), u(g);
  return m;
}

double random_r(std::mt19937_64& g, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  double r = u(g);
  return (g() & 1) ? r : -r;
}

}  // namespace

TEST_CASE("forward transform of the cubic scalar field matches its Hamiltonian") {
  auto g = rng(43);
  MetricSignature eta = MetricSignature::minkowski_1p1();
  const double m = 1.3, lambda = 0.4;
  LagrangianDensity L = LagrangianDensity::scalar_cubic(eta, m, lambda);
  DWChart dw(2, 1);
  HamiltonianDensity H = HamiltonianDensity::scalar_cubic(dw, eta, m, lambda);

  for (int t = 0; t < 20; ++t) {
    Vec x = test::random_point(g, 2), y = test::random_point(g, 1);
    Eigen::MatrixXd v(1, 2);
    v << test::random_point(g, 2).transpose();
    auto [p, h] = dw_legendre(L, x, y, v);

    // p^mu = eta^{mu nu} v_nu
    CHECK(p(0, 0) == doctest::Approx(-v(0, 0)));
    CHECK(p(0, 1) == doctest::Approx(v(0, 1)));

    Vec pt = Vec::Zero(dw.chart().dim());
    pt[dw.iy(1)] = y[0];
    pt[dw.ip(0, 1)] = p(0, 0);
    pt[dw.ip(1, 1)] = p(0, 1);
    pt[dw.ie()] = 0.7;  // H density is e + H(y, p)
    CHECK(H(pt) == doctest::Approx(0.7 + h).epsilon(1e-12));

    // dH/de = 1: the value minus e is independent of e
    CHECK(H.density.partial(dw.ie())(pt) == doctest::Approx(1.0));

    // inverse direction: v_mu = eta_{mu nu} p^nu
    Eigen::MatrixXd v_back = dw_inverse_legendre(H, dw, x, y, p);
    CHECK((v_back - v).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("quadratic map transform basics and round trip") {
  auto g = rng(47);
  LagrangianDensity L = LagrangianDensity::harmonic_map22();
  Vec x = Vec::Zero(2), y = Vec::Zero(2);

  auto [p0, h0] = dw_legendre(L, x, y, Eigen::Matrix2d::Zero());
  CHECK(p0.norm() == 0.0);
  CHECK(h0 == 0.0);

  Eigen::Matrix2d e11 = Eigen::Matrix2d::Zero();
  e11(0, 0) = 1.0;
  auto [p1, h1] = dw_legendre(L, x, y, e11);
  CHECK((p1 - e11).norm() == 0.0);
  CHECK(h1 == doctest::Approx(0.5));

  // H = e + |p|^2/2 on the (n=2, k=2) chart
  DWChart dw(2, 2);
  const int dim = dw.chart().dim();
  ScalarField h = ScalarField::coordinate(dim, dw.ie());
  for (int mu = 0; mu < 2; ++mu)
    for (int i = 1; i <= 2; ++i) {
      ScalarField pc = ScalarField::coordinate(dim, dw.ip(mu, i));
      h = h + 0.5 * pc * pc;
    }
  HamiltonianDensity H{dw.chart(), h};

  CHECK(dw_inverse_legendre(H, dw, x, y, Eigen::Matrix2d::Zero()).norm() == 0.0);

  for (int t = 0; t < 100; ++t) {
    Eigen::Matrix2d v = random_m22(g);
    auto [p, hval] = dw_legendre(L, x, y, v);
    Eigen::Matrix2d v_back = dw_inverse_legendre(H, dw, x, y, p);
    auto [p_back, h2] = dw_legendre(L, x, y, v_back);
    CHECK((v_back - v).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((p_back - p).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("fiber pairing worked values") {
  LepagePoint P;
  P.e = 5.0;
  CHECK(lepage_pairing(Eigen::Matrix2d::Zero(), P) == doctest::Approx(5.0));

  P.e = 0.0;
  P.r = 1.0;
  CHECK(lepage_pairing(Eigen::Matrix2d::Identity(), P) == doctest::Approx(1.0));

  P.e = 1.0;
  P.r = 0.0;
  P.p = Eigen::Matrix2d::Identity();
  CHECK(lepage_pairing(Eigen::Matrix2d::Identity(), P) == doctest::Approx(3.0));
}

TEST_CASE("correspondence: explicit solves and degeneration") {
  auto g = rng(53);
  Vec x = Vec::Zero(2), y = Vec::Zero(2);
  LagrangianDensity L0 = LagrangianDensity::trivial22();

  for (int t = 0; t < 10; ++t) {
    Eigen::Matrix2d v = random_m22(g);
    double r = random_r(g, 0.2, 2.0);
    Eigen::Matrix2d p = lepage_correspondence(L0, x, y, v, r);
    // p^mu_i = -r eps^{mu nu} eps_{ij} dv^j/dx^nu, spelled out per entry
    CHECK(p(0, 0) == doctest::Approx(-r * v(1, 1)));
    CHECK(p(1, 0) == doctest::Approx(r * v(0, 1)));
    CHECK(p(0, 1) == doctest::Approx(r * v(1, 0)));
    CHECK(p(1, 1) == doctest::Approx(-r * v(0, 0)));
    LepagePoint P{0.0, p, r};
    CHECK(correspondence_residual(L0, x, y, v, P) < 1e-14);
  }

  // r = 0 forces p = 0 exactly: the flat problem degenerates
  for (int t = 0; t < 5; ++t)
    CHECK(lepage_correspondence(L0, x, y, random_m22(g), 0.0).norm() == 0.0);

  // r = 0 with a generic Lagrangian reduces to dL/dv
  LagrangianDensity Lh = LagrangianDensity::harmonic_map22();
  Eigen::Matrix2d v = random_m22(g);
  CHECK((lepage_correspondence(Lh, x, y, v, 0.0) - v).norm() == 0.0);

  // harmonic, v = identity, r = 1: p = v - cof(v)
  Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  CHECK((lepage_correspondence(Lh, x, y, id, 1.0) - (id - lepage_cofactor(id))).norm() == 0.0);
}

TEST_CASE("stationary-point Hamiltonian reproduces the closed forms") {
  auto g = rng(59);
  Vec x = Vec::Zero(2), y = Vec::Zero(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  LagrangianDensity L0 = LagrangianDensity::trivial22();
  LagrangianDensity Lh = LagrangianDensity::harmonic_map22();
  LagrangianDensity Lm = LagrangianDensity::maxwell22();

  for (int t = 0; t < 30; ++t) {
    LepagePoint P;
    P.e = u(g);
    P.p = random_m22(g);

    P.r = random_r(g, 0.3, 2.0);
    auto res0 = lepage_hamiltonian(L0, x, y, P);
    CHECK(res0.residual <= 1e-12);
    CHECK(res0.hamiltonian == doctest::Approx(trivial_hamiltonian(P)).epsilon(1e-9));

    P.r = random_r(g, 0.3, 0.85);
    if (g() & 1) P.r *= 2.0;  // also sample |r| in (0.6, 1.7) \ near 1
    if (std::abs(std::abs(P.r) - 1.0) < 0.1) P.r = 0.5;
    auto resh = lepage_hamiltonian(Lh, x, y, P);
    CHECK(resh.residual <= 1e-12);
    CHECK(resh.hamiltonian == doctest::Approx(harmonic_hamiltonian(P)).epsilon(1e-9));

    P.r = random_r(g, 0.3, 1.8);
    auto resm = lepage_hamiltonian(Lm, x, y, P);
    CHECK(resm.residual <= 1e-12);
    CHECK(resm.hamiltonian == doctest::Approx(maxwell_hamiltonian(P)).epsilon(1e-9));
  }

  // flat Lagrangian at r = 0 has a singular stationarity system
  LepagePoint bad;
  bad.p = random_m22(g);
  bad.r = 0.0;
  CHECK_THROWS_AS(lepage_hamiltonian(L0, x, y, bad), SingularJacobian);
}

TEST_CASE("consistency through the correspondence, including a nonlinear density") {
  auto g = rng(61);
  Vec x = Vec::Zero(2), y = Vec::Zero(2);
  LagrangianDensity Lh = LagrangianDensity::harmonic_map22();
  LagrangianDensity Lq = LagrangianDensity::quartic22(0.3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int t = 0; t < 100; ++t) {
    Eigen::Matrix2d v = random_m22(g);
    double e = u(g);

    double r = random_r(g, 0.2, 0.8);
    LepagePoint P{e, lepage_correspondence(Lh, x, y, v, r), r};
    double expected = e + (P.p.array() * v.array()).sum() + r * v.determinant() - Lh.eval(x, y, v);
    auto res = lepage_hamiltonian(Lh, x, y, P);
    CHECK(res.hamiltonian == doctest::Approx(expected).epsilon(1e-10));

    double rq = random_r(g, 0.1, 0.5);
    LepagePoint Q{e, lepage_correspondence(Lq, x, y, v, rq), rq};
    double expected_q = e + (Q.p.array() * v.array()).sum() + rq * v.determinant() - Lq.eval(x, y, v);
    auto res_q = lepage_hamiltonian(Lq, x, y, Q);
    CHECK(res_q.residual <= 1e-12);
    CHECK(res_q.hamiltonian == doctest::Approx(expected_q).epsilon(1e-10));
    CHECK((res_q.v - v).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("pseudofibers: spanning directions stay in correspondence") {
  auto g = rng(67);
  Vec x = Vec::Zero(2), y = Vec::Zero(2);
  LagrangianDensity Lh = LagrangianDensity::harmonic_map22();

  // v = 0: the plane is spanned by the volume direction and dy1^dy2
  Pseudofiber f0 = pseudofiber_at(LagrangianDensity::trivial22(), x, y, Eigen::Matrix2d::Zero());
  Eigen::Matrix<double, 6, 1> pure_e, pure_r;
  pure_e << 1, 0, 0, 0, 0, 0;
  pure_r << 0, 0, 0, 0, 0, 1;
  CHECK((f0.dir_volume - pure_e).norm() == 0.0);
  CHECK((f0.dir_mixed - pure_r).norm() == 0.0);

  for (int t = 0; t < 20; ++t) {
    Eigen::Matrix2d v = random_m22(g);
    Pseudofiber f = pseudofiber_at(Lh, x, y, v);
    CHECK(correspondence_residual(Lh, x, y, v, f.base) < 1e-13);

    // affine dimension two: both translates still solve the correspondence
    for (double step : {-1.0, 2.5}) {
      LepagePoint shifted_e = LepagePoint::from_vector(f.base.as_vector() + step * f.dir_volume);
      LepagePoint shifted_m = LepagePoint::from_vector(f.base.as_vector() + step * f.dir_mixed);
      CHECK(correspondence_residual(Lh, x, y, v, shifted_e) < 1e-12);
      CHECK(correspondence_residual(Lh, x, y, v, shifted_m) < 1e-12);
    }
    CHECK(std::abs(f.dir_volume.dot(f.dir_mixed)) < f.dir_mixed.norm());  // independent directions
  }
}
