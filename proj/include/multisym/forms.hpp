#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "multisym/scalar_field.hpp"

namespace multisym {

using IndexTuple = std::vector<int>;

/// Decomposable q-multivector X = X_1 ^ ... ^ X_q anchored at a point.
struct Multivector {
  Vec point;
  std::vector<Vec> factors;

  int order() const { return static_cast<int>(factors.size()); }
};

/// Fully antisymmetric covariant tensor at a single point, stored by
/// strictly increasing basis tuples.
struct PointForm {
  int dim = 0;
  int degree = 0;
  std::map<IndexTuple, double> comps;

  double comp(const IndexTuple& idx) const {
    auto it = comps.find(idx);
    return it == comps.end() ? 0.0 : it->second;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& [idx, v] : comps) m = std::max(m, std::abs(v));
    return m;
  }

  PointForm& operator-=(const PointForm& o) {
    for (const auto& [idx, v] : o.comps) comps[idx] -= v;
    return *this;
  }

  double evaluate(const std::vector<Vec>& vectors) const;
};

/// Sparse exterior form: strictly increasing index tuples with sign absorbed
/// into the coefficient. Absent tuples are zero. Immutable in spirit: build,
/// then share.
class DiffForm {
 public:
  DiffForm() = default;
  DiffForm(Chart chart, int degree) : chart_(std::move(chart)), degree_(degree) {
    if (degree < 0 || degree > chart_.dim())
      throw DegreeError("DiffForm: degree out of range for chart");
  }

  const Chart& chart() const { return chart_; }
  int degree() const { return degree_; }
  int dim() const { return chart_.dim(); }
  const std::map<IndexTuple, ScalarField>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Add a term on a strictly increasing tuple.
  void add_term(IndexTuple idx, ScalarField coeff);

  /// Add coeff * dz^{i1} ^ ... ^ dz^{iq} for an arbitrary tuple; sorts and
  /// absorbs the permutation sign. A repeated index contributes nothing.
  void add_monomial(const IndexTuple& idx, const ScalarField& coeff);

  /// Convenience for label-addressed construction.
  void add_monomial(const std::vector<std::string>& labels, const ScalarField& coeff);

  ScalarField coeff(const IndexTuple& idx) const;
  ScalarField coeff(const std::vector<std::string>& labels) const;

  PointForm at_point(const Vec& p) const;

  friend DiffForm operator+(const DiffForm& a, const DiffForm& b);
  friend DiffForm operator-(const DiffForm& a, const DiffForm& b);
  friend DiffForm operator*(double c, const DiffForm& a);

 private:
  Chart chart_;
  int degree_ = 0;
  std::map<IndexTuple, ScalarField> terms_;
};

/// Sign of the permutation sorting `idx`; 0 if an index repeats.
int sort_sign(IndexTuple& idx);

/// Graded-commutative exterior product.
DiffForm wedge(const DiffForm& a, const DiffForm& b);

/// Exterior derivative. Requires every coefficient to carry exact first
/// derivatives.
DiffForm exterior_derivative(const DiffForm& a);

/// X |_ omega evaluated at X.point: the (deg omega - order X) tensor
/// (V...) -> omega(X_1,...,X_q,V...).
PointForm interior_product(const Multivector& X, const DiffForm& omega);

/// Full evaluation alpha(v_1,...,v_q) at a point; arity must match degree.
double evaluate(const DiffForm& alpha, const std::vector<Vec>& vectors, const Vec& point);

/// Symbolic contraction with a constant coordinate direction d/dz^a.
DiffForm contract_basis(const DiffForm& alpha, int a);

/// Symbolic contraction with a vector field given by ScalarField components.
DiffForm contract_field(const DiffForm& alpha, const std::vector<ScalarField>& xi);

/// All strictly increasing q-tuples over {0,...,dim-1}.
std::vector<IndexTuple> increasing_tuples(int dim, int q);

}  // namespace multisym
