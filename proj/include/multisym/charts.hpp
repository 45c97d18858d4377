#pragma once

#include "multisym/forms.hpp"

namespace multisym {

/// Constant diagonal metric with entries +-1; the inverse equals itself
/// entry-wise but both directions are kept explicit.
struct MetricSignature {
  std::vector<double> eta_up;    // eta^{mu nu} diagonal
  std::vector<double> eta_down;  // eta_{mu nu} diagonal

  static MetricSignature minkowski_1p1() { return {{-1.0, 1.0}, {-1.0, 1.0}}; }
  static MetricSignature euclidean(int n) {
    return {std::vector<double>(n, 1.0), std::vector<double>(n, 1.0)};
  }

  double up(int mu, int nu) const { return mu == nu ? eta_up.at(mu) : 0.0; }
  double down(int mu, int nu) const { return mu == nu ? eta_down.at(mu) : 0.0; }
  int n() const { return static_cast<int>(eta_up.size()); }
};

/// Extended momentum chart for maps between an n-dimensional source and a
/// k-dimensional target, with the energy coordinate conjugate to the volume
/// form. Coordinate order: x^0..x^{n-1}, y^1..y^k, e, p^{mu}_{i} row-major
/// in (mu, i). Source labels may start at any base index (x1, x2, ... when
/// base = 1).
class DWChart {
 public:
  DWChart(int n, int k, int x_base = 0);

  int n() const { return n_; }
  int k() const { return k_; }
  const Chart& chart() const { return chart_; }

  int ix(int mu) const { return mu; }
  int iy(int i) const { return n_ + (i - 1); }  // i in 1..k
  int ie() const { return n_ + k_; }
  int ip(int mu, int i) const { return n_ + k_ + 1 + mu * k_ + (i - 1); }

  std::string x_label(int mu) const { return chart_.label(ix(mu)); }
  std::string y_label(int i) const { return chart_.label(iy(i)); }
  std::string p_label(int mu, int i) const { return chart_.label(ip(mu, i)); }

 private:
  int n_, k_, x_base_;
  Chart chart_;
};

/// Full second-exterior-power chart over a 2+2-dimensional base:
/// (x1, x2, y1, y2, e, p1_1, p1_2, p2_1, p2_2, r).
class LepageChart22 {
 public:
  LepageChart22();

  const Chart& chart() const { return chart_; }

  int ix(int mu) const { return mu - 1; }          // mu in 1..2
  int iy(int i) const { return 1 + i; }            // i in 1..2
  int ie() const { return 4; }
  int ip(int mu, int i) const { return 4 + 2 * (mu - 1) + i; }  // mu,i in 1..2
  int ir() const { return 9; }

  /// Alternating symbol, eps(1,2) = +1. Shared by every consumer.
  static double epsilon(int mu, int nu) {
    if (mu == 1 && nu == 2) return 1.0;
    if (mu == 2 && nu == 1) return -1.0;
    return 0.0;
  }

 private:
  Chart chart_;
};

/// Volume form dx^0 ^ ... ^ dx^{n-1}.
DiffForm omega_volume(const DWChart& dw);

/// omega_mu = d/dx^mu |_ omega, an (n-1)-form with sign (-1)^mu.
DiffForm omega_mu(const DWChart& dw, int mu);

/// theta = e omega + p^{mu}_{i} dy^i ^ omega_mu.
DiffForm build_theta_ddw(const DWChart& dw);

/// Omega = de ^ omega + dp^{mu}_{i} ^ dy^i ^ omega_mu. Equals d(theta).
DiffForm build_omega_ddw(const DWChart& dw);

/// Momentum part alone: dp^{mu}_{i} ^ dy^i ^ omega_mu (no energy term).
DiffForm build_omega_star(const DWChart& dw);

/// Omega = de^dx1^dx2 + eps_{mu nu} dp^mu_i ^ dy^i ^ dx^nu + dr^dy1^dy2.
DiffForm build_omega_lepage(const LepageChart22& lp);

/// True iff xi -> xi |_ Omega has trivial kernel at the point (full SVD rank
/// with relative threshold).
bool nondegeneracy_check(const DiffForm& omega, const Vec& point, double rel_threshold = 1e-10);

/// Matrix of the linear map xi -> xi |_ Omega at a point: rows indexed by
/// increasing (deg-1)-tuples, columns by coordinate directions.
Eigen::MatrixXd contraction_matrix(const DiffForm& omega, const Vec& point);

/// Chart layout for run-report provenance.
std::string chart_layout_json(const Chart& chart);

}  // namespace multisym
