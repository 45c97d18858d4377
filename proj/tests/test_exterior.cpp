#include <algorithm>

#include "doctest.h"
#include "multisym/forms.hpp"
#include "test_support.hpp"

using namespace multisym;
using test::rng;

namespace multisym::test {

double brute_force_evaluate(const PointForm& f, const std::vector<Vec>& vectors) {
  const int q = f.degree;
  std::vector<int> perm(q);
  for (int i = 0; i < q; ++i) perm[i] = i;
  double total = 0.0;
  // Sum over permutations: f(v_1..v_q) = sum_I f_I sum_sigma sgn(sigma) prod v_{sigma(r)}[I_r] / ...
  // Using the basis expansion directly: dz^I(v_1..v_q) = sum_sigma sgn prod_r v_{sigma(r)}[I_r].
  for (const auto& [idx, coeff] : f.comps) {
    std::vector<int> sigma(q);
    for (int i = 0; i < q; ++i) sigma[i] = i;
    do {
      // permutation sign by counting inversions
      int inv = 0;
      for (int a = 0; a < q; ++a)
        for (int b = a + 1; b < q; ++b)
          if (sigma[a] > sigma[b]) ++inv;
      double prod = 1.0;
      for (int r = 0; r < q; ++r) prod *= vectors[sigma[r]][idx[r]];
      total += coeff * (inv % 2 == 0 ? 1.0 : -1.0) * prod;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
  }
  return total;
}

}  // namespace multisym::test

namespace {

Chart chart3() { return Chart({"x1", "x2", "y1"}); }

}  // namespace

TEST_CASE("wedge of basis one-forms") {
  Chart c = chart3();
  const int dim = 3;
  DiffForm dx1(c, 1), dx2(c, 1);
  dx1.add_term({0}, ScalarField::constant(dim, 1.0));
  dx2.add_term({1}, ScalarField::constant(dim, 1.0));

  DiffForm w = wedge(dx1, dx2);
  Vec p = Vec::Zero(dim);
  CHECK(w.degree() == 2);
  CHECK(w.at_point(p).comp({0, 1}) == doctest::Approx(1.0));

  // odd-degree alpha ^ alpha = 0
  auto g = rng();
  DiffForm alpha = test::random_form(g, c, 1);
  DiffForm sq = wedge(alpha, alpha);
  for (int t = 0; t < 5; ++t) {
    Vec q = test::random_point(g, dim);
    CHECK(sq.at_point(q).max_abs() == doctest::Approx(0.0));
  }
}

TEST_CASE("wedge sign from transposition, derived by hand") {
  // (2 dy1) ^ (3 dx2) = -6 dx2 ^ dy1 on chart order (x1, x2, y1)
  Chart c = chart3();
  const int dim = 3;
  DiffForm a(c, 1), b(c, 1);
  a.add_term({2}, ScalarField::constant(dim, 2.0));  // 2 dy1
  b.add_term({1}, ScalarField::constant(dim, 3.0));  // 3 dx2
  DiffForm w = wedge(a, b);
  Vec p = Vec::Zero(dim);
  CHECK(w.at_point(p).comp({1, 2}) == doctest::Approx(-6.0));
}

TEST_CASE("wedge errors") {
  Chart c = chart3();
  Chart other({"a", "b", "c"});
  DiffForm f(c, 1), g(other, 1), two(c, 2);
  f.add_term({0}, ScalarField::constant(3, 1.0));
  g.add_term({0}, ScalarField::constant(3, 1.0));
  two.add_term({0, 1}, ScalarField::constant(3, 1.0));
  CHECK_THROWS_AS(wedge(f, g), ChartMismatch);
  CHECK_THROWS_AS(wedge(two, two), DegreeError);
}

TEST_CASE("exterior derivative of a coordinate-coefficient term") {
  // d(e dx1 ^ dx2) = de ^ dx1 ^ dx2 = + dx1 ^ dx2 ^ de after sorting
  Chart c({"x1", "x2", "e"});
  const int dim = 3;
  DiffForm a(c, 2);
  a.add_term({0, 1}, ScalarField::coordinate(dim, 2));
  DiffForm da = exterior_derivative(a);
  Vec p = Vec::Zero(dim);
  CHECK(da.at_point(p).comp({0, 1, 2}) == doctest::Approx(1.0));
}

TEST_CASE("d matches the finite-difference oracle on random polynomial forms") {
  auto g = rng(7);
  Chart c({"x1", "x2", "y1", "y2", "e"});
  for (int trial = 0; trial < 5; ++trial) {
    DiffForm a = test::random_form(g, c, 1 + static_cast<int>(g() % 2));
    DiffForm da = exterior_derivative(a);
    Vec p = test::random_point(g, c.dim());
    // Richardson: central-difference error should shrink ~4x per halving.
    double e1 = test::max_comp_diff(da.at_point(p), test::fd_exterior_derivative_at(a, p, 1e-2));
    double e2 = test::max_comp_diff(da.at_point(p), test::fd_exterior_derivative_at(a, p, 5e-3));
    CHECK(e1 < 1e-2);
    if (e1 > 1e-10) {
      double order = std::log2(e1 / e2);
      CHECK(order == doctest::Approx(2.0).epsilon(0.35));
    }
  }
}

TEST_CASE("d of d vanishes on polynomial coefficients") {
  auto g = rng(11);
  Chart c({"x1", "x2", "y1", "y2", "e"});

  // f = product of three coordinates
  ScalarField f = ScalarField::coordinate(5, 0) * ScalarField::coordinate(5, 2) *
                  ScalarField::coordinate(5, 4);
  DiffForm zero_form(c, 0);
  zero_form.add_term({}, f);
  DiffForm ddf = exterior_derivative(exterior_derivative(zero_form));
  for (int t = 0; t < 10; ++t)
    CHECK(ddf.at_point(test::random_point(g, 5)).max_abs() == doctest::Approx(0.0));

  for (int trial = 0; trial < 5; ++trial) {
    DiffForm a = test::random_form(g, c, 1);
    DiffForm dda = exterior_derivative(exterior_derivative(a));
    for (int t = 0; t < 5; ++t)
      CHECK(dda.at_point(test::random_point(g, 5)).max_abs() == doctest::Approx(0.0));
  }
}

TEST_CASE("d requires exact gradients") {
  Chart c = chart3();
  DiffForm a(c, 1);
  a.add_term({0}, ScalarField::opaque(3, [](const Vec& p) { return p[1] * p[1]; }));
  CHECK_THROWS_AS(exterior_derivative(a), MissingGradient);
}

TEST_CASE("Leibniz rule for d on random low-degree forms") {
  auto g = rng(13);
  Chart c({"x1", "x2", "y1", "y2"});
  for (int trial = 0; trial < 4; ++trial) {
    DiffForm a = test::random_form(g, c, 1);
    DiffForm b = test::random_form(g, c, 1);
    DiffForm lhs = exterior_derivative(wedge(a, b));
    DiffForm rhs = wedge(exterior_derivative(a), b) - wedge(a, exterior_derivative(b));
    for (int t = 0; t < 5; ++t) {
      Vec p = test::random_point(g, 4);
      CHECK(test::max_comp_diff(lhs.at_point(p), rhs.at_point(p)) < 1e-13);
    }
  }
}

TEST_CASE("interior product against brute-force antisymmetrized evaluation") {
  auto g = rng(17);
  Chart c({"x1", "x2", "e"});
  // de ^ dx1 ^ dx2 in chart order: e is index 2
  DiffForm omega(c, 3);
  omega.add_monomial(IndexTuple{2, 0, 1}, ScalarField::constant(3, 1.0));

  for (int trial = 0; trial < 10; ++trial) {
    Multivector X{test::random_point(g, 3), test::random_vectors(g, 3, 2)};
    PointForm res = interior_product(X, omega);
    // compare against full evaluation on a random closing vector
    Vec v = test::random_point(g, 3);
    double direct = evaluate(omega, {X.factors[0], X.factors[1], v}, X.point);
    double via = res.evaluate({v});
    CHECK(direct == doctest::Approx(via).epsilon(1e-12));
    double brute = test::brute_force_evaluate(omega.at_point(X.point), {X.factors[0], X.factors[1], v});
    CHECK(direct == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("interior product is alternating and multilinear") {
  auto g = rng(19);
  Chart c({"x1", "x2", "y1", "y2", "e"});
  DiffForm omega = test::random_form(g, c, 3);
  Vec p = test::random_point(g, 5);

  Vec a = test::random_point(g, 5), b = test::random_point(g, 5);
  Multivector repeated{p, {a, a}};
  CHECK(interior_product(repeated, omega).max_abs() == doctest::Approx(0.0));

  Multivector with_zero{p, {Vec(Vec::Zero(5)), b}};
  CHECK(interior_product(with_zero, omega).max_abs() == doctest::Approx(0.0));

  CHECK_THROWS_AS(interior_product(Multivector{p, {a, b, a, b}}, omega), DegreeError);
}

TEST_CASE("evaluate: normalization, antisymmetry, determinant") {
  Chart c({"x1", "x2"});
  DiffForm w(c, 2);
  w.add_term({0, 1}, ScalarField::constant(2, 1.0));
  Vec p = Vec::Zero(2);
  Vec e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  CHECK(evaluate(w, {e1, e2}, p) == doctest::Approx(1.0));
  CHECK(evaluate(w, {e2, e1}, p) == doctest::Approx(-1.0));

  Vec v1(2), v2(2);
  v1 << 1, 2;  // d/dx1 + 2 d/dx2
  v2 << 0, 3;  // 3 d/dx2
  CHECK(evaluate(w, {v1, v2}, p) == doctest::Approx(3.0));
  CHECK_THROWS_AS(evaluate(w, {v1}, p), DegreeError);
}

TEST_CASE("declared gradients match central differences at order 2") {
  auto g = rng(23);
  const int dim = 4;
  ScalarField f = sin(ScalarField::coordinate(dim, 0) * ScalarField::coordinate(dim, 1)) +
                  exp(0.3 * ScalarField::coordinate(dim, 2)) *
                      pow_int(ScalarField::coordinate(dim, 3), 3);
  for (int t = 0; t < 20; ++t) {
    Vec p = test::random_point(g, dim);
    Vec grad = f.gradient(p);
    for (int j = 0; j < dim; ++j) {
      auto fd = [&](double h) {
        Vec pp = p, pm = p;
        pp[j] += h;
        pm[j] -= h;
        return (f(pp) - f(pm)) / (2 * h);
      };
      double e1 = std::abs(fd(1e-2) - grad[j]);
      double e2 = std::abs(fd(5e-3) - grad[j]);
      if (e1 > 1e-9) {
        double order = std::log2(e1 / e2);
        CHECK(order == doctest::Approx(2.0).epsilon(0.1));
      } else {
        CHECK(e2 < 1e-8);
      }
    }
  }
}
