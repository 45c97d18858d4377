#include "multisym/forms.hpp"

namespace multisym {

namespace {

// det of the q x q matrix rows(idx) x columns(vectors)
double minor_det(const IndexTuple& idx, const std::vector<Vec>& vectors) {
  const int q = static_cast<int>(idx.size());
  if (q == 0) return 1.0;
  Eigen::MatrixXd m(q, q);
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c) m(r, c) = vectors[c][idx[r]];
  return m.determinant();
}

}  // namespace

int sort_sign(IndexTuple& idx) {
  int sign = 1;
  // insertion sort, counting transpositions
  for (size_t i = 1; i < idx.size(); ++i) {
    size_t j = i;
    while (j > 0 && idx[j - 1] > idx[j]) {
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
      --j;
    }
  }
  for (size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}

void DiffForm::add_term(IndexTuple idx, ScalarField coeff) {
  if (static_cast<int>(idx.size()) != degree_)
    throw DegreeError("DiffForm::add_term: tuple length != degree");
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= dim())
      throw std::invalid_argument("DiffForm::add_term: index out of range");
    if (i > 0 && idx[i] <= idx[i - 1])
      throw std::invalid_argument("DiffForm::add_term: tuple not strictly increasing");
  }
  auto it = terms_.find(idx);
  if (it == terms_.end())
    terms_.emplace(std::move(idx), std::move(coeff));
  else
    it->second = it->second + coeff;
}

void DiffForm::add_monomial(const IndexTuple& idx, const ScalarField& coeff) {
  IndexTuple sorted = idx;
  int sign = sort_sign(sorted);
  if (sign == 0) return;
  add_term(std::move(sorted), sign == 1 ? coeff : -coeff);
}

void DiffForm::add_monomial(const std::vector<std::string>& labels, const ScalarField& coeff) {
  IndexTuple idx;
  idx.reserve(labels.size());
  for (const auto& l : labels) idx.push_back(chart_.index(l));
  add_monomial(idx, coeff);
}

ScalarField DiffForm::coeff(const IndexTuple& idx) const {
  auto it = terms_.find(idx);
  if (it != terms_.end()) return it->second;
  return ScalarField::constant(dim(), 0.0);
}

ScalarField DiffForm::coeff(const std::vector<std::string>& labels) const {
  IndexTuple idx;
  for (const auto& l : labels) idx.push_back(chart_.index(l));
  return coeff(idx);
}

PointForm DiffForm::at_point(const Vec& p) const {
  PointForm out;
  out.dim = dim();
  out.degree = degree_;
  for (const auto& [idx, c] : terms_) out.comps[idx] = c(p);
  return out;
}

DiffForm operator+(const DiffForm& a, const DiffForm& b) {
  if (a.chart_ != b.chart_) throw ChartMismatch("DiffForm +: chart mismatch");
  if (a.degree_ != b.degree_) throw DegreeError("DiffForm +: degree mismatch");
  DiffForm out(a.chart_, a.degree_);
  out.terms_ = a.terms_;
  for (const auto& [idx, c] : b.terms_) {
    auto it = out.terms_.find(idx);
    if (it == out.terms_.end())
      out.terms_.emplace(idx, c);
    else
      it->second = it->second + c;
  }
  return out;
}

DiffForm operator-(const DiffForm& a, const DiffForm& b) { return a + (-1.0) * b; }

DiffForm operator*(double c, const DiffForm& a) {
  DiffForm out(a.chart_, a.degree_);
  for (const auto& [idx, f] : a.terms_) out.terms_.emplace(idx, c * f);
  return out;
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
  if (a.chart() != b.chart()) throw ChartMismatch("wedge: chart mismatch");
  if (a.degree() + b.degree() > a.dim()) throw DegreeError("wedge: degree exceeds chart dimension");
  DiffForm out(a.chart(), a.degree() + b.degree());
  for (const auto& [ia, ca] : a.terms()) {
    for (const auto& [ib, cb] : b.terms()) {
      IndexTuple idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      out.add_monomial(idx, ca * cb);
    }
  }
  return out;
}

DiffForm exterior_derivative(const DiffForm& a) {
  DiffForm out(a.chart(), a.degree() + 1);
  for (const auto& [idx, c] : a.terms()) {
    for (int j = 0; j < a.dim(); ++j) {
      if (std::binary_search(idx.begin(), idx.end(), j)) continue;
      IndexTuple ext;
      ext.reserve(idx.size() + 1);
      ext.push_back(j);
      ext.insert(ext.end(), idx.begin(), idx.end());
      out.add_monomial(ext, c.partial(j));
    }
  }
  return out;
}

double PointForm::evaluate(const std::vector<Vec>& vectors) const {
  if (static_cast<int>(vectors.size()) != degree)
    throw DegreeError("PointForm::evaluate: arity mismatch");
  double sum = 0.0;
  for (const auto& [idx, v] : comps) sum += v * minor_det(idx, vectors);
  return sum;
}

PointForm interior_product(const Multivector& X, const DiffForm& omega) {
  const int q = X.order();
  if (q > omega.degree()) throw DegreeError("interior_product: degree underflow");
  for (const auto& f : X.factors)
    if (f.size() != omega.dim())
      throw std::invalid_argument("interior_product: factor length != chart dim");

  const int rem = omega.degree() - q;
  PointForm out;
  out.dim = omega.dim();
  out.degree = rem;

  // Cache coefficient values once.
  std::vector<std::pair<const IndexTuple*, double>> vals;
  vals.reserve(omega.terms().size());
  for (const auto& [idx, c] : omega.terms()) {
    double v = c(X.point);
    if (v != 0.0) vals.emplace_back(&idx, v);
  }

  std::vector<Vec> args = X.factors;
  args.resize(q + rem);
  for (const auto& J : increasing_tuples(omega.dim(), rem)) {
    for (int r = 0; r < rem; ++r) {
      Vec e = Vec::Zero(omega.dim());
      e[J[r]] = 1.0;
      args[q + r] = e;
    }
    double sum = 0.0;
    for (const auto& [idx, v] : vals) sum += v * minor_det(*idx, args);
    if (sum != 0.0) out.comps[J] = sum;
  }
  return out;
}

double evaluate(const DiffForm& alpha, const std::vector<Vec>& vectors, const Vec& point) {
  if (static_cast<int>(vectors.size()) != alpha.degree())
    throw DegreeError("evaluate: arity mismatch");
  double sum = 0.0;
  for (const auto& [idx, c] : alpha.terms()) {
    double v = c(point);
    if (v != 0.0) sum += v * minor_det(idx, vectors);
  }
  return sum;
}

DiffForm contract_basis(const DiffForm& alpha, int a) {
  if (alpha.degree() < 1) throw DegreeError("contract_basis: degree underflow");
  DiffForm out(alpha.chart(), alpha.degree() - 1);
  for (const auto& [idx, c] : alpha.terms()) {
    for (size_t r = 0; r < idx.size(); ++r) {
      if (idx[r] != a) continue;
      IndexTuple rest;
      rest.reserve(idx.size() - 1);
      for (size_t s = 0; s < idx.size(); ++s)
        if (s != r) rest.push_back(idx[s]);
      out.add_term(std::move(rest), (r % 2 == 0) ? c : -c);
    }
  }
  return out;
}

DiffForm contract_field(const DiffForm& alpha, const std::vector<ScalarField>& xi) {
  if (static_cast<int>(xi.size()) != alpha.dim())
    throw std::invalid_argument("contract_field: component count != chart dim");
  DiffForm out(alpha.chart(), alpha.degree() - 1);
  for (const auto& [idx, c] : alpha.terms()) {
    for (size_t r = 0; r < idx.size(); ++r) {
      IndexTuple rest;
      rest.reserve(idx.size() - 1);
      for (size_t s = 0; s < idx.size(); ++s)
        if (s != r) rest.push_back(idx[s]);
      ScalarField term = xi[idx[r]] * c;
      out.add_term(std::move(rest), (r % 2 == 0) ? term : -term);
    }
  }
  return out;
}

std::vector<IndexTuple> increasing_tuples(int dim, int q) {
  std::vector<IndexTuple> out;
  if (q == 0) {
    out.push_back({});
    return out;
  }
  IndexTuple cur(q);
  std::function<void(int, int)> rec = [&](int start, int pos) {
    if (pos == q) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < dim; ++i) {
      cur[pos] = i;
      rec(i + 1, pos + 1);
    }
  };
  rec(0, 0);
  return out;
}

}  // namespace multisym
