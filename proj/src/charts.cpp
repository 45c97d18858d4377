#include "multisym/charts.hpp"

#include <nlohmann/json.hpp>

namespace multisym {

DWChart::DWChart(int n, int k, int x_base) : n_(n), k_(k), x_base_(x_base) {
  if (n < 1 || k < 1) throw std::invalid_argument("DWChart: n, k must be positive");
  std::vector<std::string> labels;
  for (int mu = 0; mu < n; ++mu) labels.push_back("x" + std::to_string(x_base + mu));
  for (int i = 1; i <= k; ++i) labels.push_back("y" + std::to_string(i));
  labels.push_back("e");
  for (int mu = 0; mu < n; ++mu)
    for (int i = 1; i <= k; ++i)
      labels.push_back("p" + std::to_string(x_base + mu) + "_" + std::to_string(i));
  chart_ = Chart(std::move(labels));
}

LepageChart22::LepageChart22() {
  chart_ = Chart({"x1", "x2", "y1", "y2", "e", "p1_1", "p1_2", "p2_1", "p2_2", "r"});
}

DiffForm omega_volume(const DWChart& dw) {
  DiffForm w(dw.chart(), dw.n());
  IndexTuple idx(dw.n());
  for (int mu = 0; mu < dw.n(); ++mu) idx[mu] = dw.ix(mu);
  w.add_term(idx, ScalarField::constant(dw.chart().dim(), 1.0));
  return w;
}

DiffForm omega_mu(const DWChart& dw, int mu) {
  if (mu < 0 || mu >= dw.n()) throw std::invalid_argument("omega_mu: index out of range");
  return contract_basis(omega_volume(dw), dw.ix(mu));
}

DiffForm build_theta_ddw(const DWChart& dw) {
  const int dim = dw.chart().dim();
  DiffForm theta(dw.chart(), dw.n());
  DiffForm e_form(dw.chart(), 0);
  e_form.add_term({}, ScalarField::coordinate(dim, dw.ie()));
  theta = wedge(e_form, omega_volume(dw));
  for (int mu = 0; mu < dw.n(); ++mu) {
    DiffForm w_mu = omega_mu(dw, mu);
    for (int i = 1; i <= dw.k(); ++i) {
      DiffForm p_dy(dw.chart(), 1);
      p_dy.add_term({dw.iy(i)}, ScalarField::coordinate(dim, dw.ip(mu, i)));
      theta = theta + wedge(p_dy, w_mu);
    }
  }
  return theta;
}

DiffForm build_omega_star(const DWChart& dw) {
  const int dim = dw.chart().dim();
  DiffForm omega(dw.chart(), dw.n() + 1);
  const ScalarField one = ScalarField::constant(dim, 1.0);
  for (int mu = 0; mu < dw.n(); ++mu) {
    DiffForm w_mu = omega_mu(dw, mu);
    for (int i = 1; i <= dw.k(); ++i) {
      DiffForm dp_dy(dw.chart(), 2);
      dp_dy.add_monomial(IndexTuple{dw.ip(mu, i), dw.iy(i)}, one);
      omega = omega + wedge(dp_dy, w_mu);
    }
  }
  return omega;
}

DiffForm build_omega_ddw(const DWChart& dw) {
  const int dim = dw.chart().dim();
  DiffForm de(dw.chart(), 1);
  de.add_term({dw.ie()}, ScalarField::constant(dim, 1.0));
  return wedge(de, omega_volume(dw)) + build_omega_star(dw);
}

DiffForm build_omega_lepage(const LepageChart22& lp) {
  const Chart& c = lp.chart();
  const int dim = c.dim();
  const ScalarField one = ScalarField::constant(dim, 1.0);
  DiffForm omega(c, 3);
  omega.add_monomial(IndexTuple{lp.ie(), lp.ix(1), lp.ix(2)}, one);
  for (int mu = 1; mu <= 2; ++mu)
    for (int nu = 1; nu <= 2; ++nu) {
      double eps = LepageChart22::epsilon(mu, nu);
      if (eps == 0.0) continue;
      for (int i = 1; i <= 2; ++i)
        omega.add_monomial(IndexTuple{lp.ip(mu, i), lp.iy(i), lp.ix(nu)}, eps * one);
    }
  omega.add_monomial(IndexTuple{lp.ir(), lp.iy(1), lp.iy(2)}, one);
  return omega;
}

Eigen::MatrixXd contraction_matrix(const DiffForm& omega, const Vec& point) {
  const int dim = omega.dim();
  const int q = omega.degree() - 1;
  auto tuples = increasing_tuples(dim, q);
  std::map<IndexTuple, int> row_of;
  for (int r = 0; r < static_cast<int>(tuples.size()); ++r) row_of[tuples[r]] = r;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<int>(tuples.size()), dim);
  for (const auto& [idx, c] : omega.terms()) {
    const double v = c(point);
    if (v == 0.0) continue;
    for (size_t r = 0; r < idx.size(); ++r) {
      IndexTuple rest;
      rest.reserve(idx.size() - 1);
      for (size_t s = 0; s < idx.size(); ++s)
        if (s != r) rest.push_back(idx[s]);
      const double sgn = (r % 2 == 0) ? 1.0 : -1.0;
      A(row_of.at(rest), idx[r]) += sgn * v;
    }
  }
  return A;
}

bool nondegeneracy_check(const DiffForm& omega, const Vec& point, double rel_threshold) {
  Eigen::MatrixXd A = contraction_matrix(omega, point);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  if (sv.size() < omega.dim()) return false;
  return sv(sv.size() - 1) > rel_threshold * sv(0);
}

std::string chart_layout_json(const Chart& chart) {
  nlohmann::json j;
  j["dim"] = chart.dim();
  j["labels"] = chart.labels();
  return j.dump();
}

}  // namespace multisym
