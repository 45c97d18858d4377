#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "multisym/errors.hpp"

namespace multisym {

using Vec = Eigen::VectorXd;

/// Named coordinate system. All modules address coordinates by label, never
/// by hard-coded index.
class Chart {
 public:
  Chart() = default;
  explicit Chart(std::vector<std::string> labels) : labels_(std::move(labels)) {
    for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
      auto [it, fresh] = index_.emplace(labels_[i], i);
      if (!fresh) throw std::invalid_argument("Chart: duplicate label " + labels_[i]);
    }
  }

  int dim() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int i) const { return labels_.at(i); }
  int index(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw std::invalid_argument("Chart: unknown label " + label);
    return it->second;
  }
  bool has(const std::string& label) const { return index_.count(label) > 0; }

  friend bool operator==(const Chart& a, const Chart& b) { return a.labels_ == b.labels_; }
  friend bool operator!=(const Chart& a, const Chart& b) { return !(a == b); }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int> index_;
};

/// Scalar function on a chart carrying its exact first derivatives.
///
/// A field built from coordinates/constants by arithmetic owns the whole
/// derivative tower; a field built from raw closures carries exactly the
/// derivative levels the caller supplied. partial() on a field without
/// derivative data throws MissingGradient.
class ScalarField {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using PartialFn = std::function<ScalarField(int)>;

  ScalarField() = default;

  double operator()(const Vec& p) const { return impl_->value(p); }

  int dim() const { return impl_->dim; }
  bool has_partials() const { return static_cast<bool>(impl_->part); }

  ScalarField partial(int j) const {
    if (!impl_->part)
      throw MissingGradient("ScalarField: no derivative data for partial(" + std::to_string(j) + ")");
    if (j < 0 || j >= impl_->dim) throw std::invalid_argument("ScalarField::partial: index out of range");
    return impl_->part(j);
  }

  /// Gradient assembled from the partial fields.
  Vec gradient(const Vec& p) const {
    Vec g(impl_->dim);
    for (int j = 0; j < impl_->dim; ++j) g[j] = partial(j)(p);
    return g;
  }

  bool is_zero_constant() const { return impl_->zero; }

  static ScalarField constant(int dim, double c) {
    return make(dim, [c](const Vec&) { return c; },
                [dim](int) { return constant(dim, 0.0); }, c == 0.0);
  }

  static ScalarField coordinate(int dim, int j) {
    if (j < 0 || j >= dim) throw std::invalid_argument("ScalarField::coordinate: index out of range");
    return make(dim, [j](const Vec& p) { return p[j]; },
                [dim, j](int i) { return constant(dim, i == j ? 1.0 : 0.0); });
  }

  /// Value plus one exact derivative level. Second derivatives are absent.
  static ScalarField from_closures(int dim, ValueFn value,
                                   std::function<Vec(const Vec&)> gradient) {
    auto grad = std::make_shared<std::function<Vec(const Vec&)>>(std::move(gradient));
    return make(dim, std::move(value), [dim, grad](int j) {
      return make(dim, [grad, j](const Vec& p) { return (*grad)(p)[j]; }, nullptr);
    });
  }

  /// Value only; exterior derivatives of forms with such coefficients throw.
  static ScalarField opaque(int dim, ValueFn value) {
    return make(dim, std::move(value), nullptr);
  }

  /// Value with an explicit list of partial fields (a finite tower).
  static ScalarField with_partials(int dim, ValueFn value, std::vector<ScalarField> partials) {
    if (static_cast<int>(partials.size()) != dim)
      throw std::invalid_argument("ScalarField::with_partials: need one field per coordinate");
    auto parts = std::make_shared<const std::vector<ScalarField>>(std::move(partials));
    return make(dim, std::move(value), [parts](int j) { return (*parts)[j]; });
  }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    check_dims(a, b);
    if (a.impl_->zero) return b;
    if (b.impl_->zero) return a;
    auto pa = a.impl_, pb = b.impl_;
    PartialFn part;
    if (pa->part && pb->part)
      part = [a, b](int j) { return a.partial(j) + b.partial(j); };
    return make(a.dim(), [pa, pb](const Vec& p) { return pa->value(p) + pb->value(p); }, part);
  }

  friend ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    return a + (-1.0) * b;
  }

  friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    check_dims(a, b);
    if (a.impl_->zero || b.impl_->zero) return constant(a.dim(), 0.0);
    auto pa = a.impl_, pb = b.impl_;
    PartialFn part;
    if (pa->part && pb->part)
      part = [a, b](int j) { return a.partial(j) * b + a * b.partial(j); };
    return make(a.dim(), [pa, pb](const Vec& p) { return pa->value(p) * pb->value(p); }, part);
  }

  friend ScalarField operator*(double c, const ScalarField& a) {
    if (c == 0.0 || a.impl_->zero) return constant(a.dim(), 0.0);
    auto pa = a.impl_;
    PartialFn part;
    if (pa->part) part = [c, a](int j) { return c * a.partial(j); };
    return make(a.dim(), [c, pa](const Vec& p) { return c * pa->value(p); }, part);
  }
  friend ScalarField operator*(const ScalarField& a, double c) { return c * a; }
  friend ScalarField operator-(const ScalarField& a) { return (-1.0) * a; }

  friend ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    check_dims(a, b);
    auto pa = a.impl_, pb = b.impl_;
    PartialFn part;
    if (pa->part && pb->part)
      part = [a, b](int j) { return (a.partial(j) * b - a * b.partial(j)) / (b * b); };
    return make(a.dim(), [pa, pb](const Vec& p) { return pa->value(p) / pb->value(p); }, part);
  }

  friend ScalarField pow_int(const ScalarField& a, int n) {
    if (n < 0) throw std::invalid_argument("pow_int: negative exponent");
    if (n == 0) return constant(a.dim(), 1.0);
    auto pa = a.impl_;
    PartialFn part;
    if (pa->part)
      part = [a, n](int j) {
        return static_cast<double>(n) * pow_int(a, n - 1) * a.partial(j);
      };
    return make(a.dim(), [pa, n](const Vec& p) { return std::pow(pa->value(p), n); }, part);
  }

  friend ScalarField sin(const ScalarField& a) {
    auto pa = a.impl_;
    PartialFn part;
    if (pa->part) part = [a](int j) { return cos(a) * a.partial(j); };
    return make(a.dim(), [pa](const Vec& p) { return std::sin(pa->value(p)); }, part);
  }

  friend ScalarField cos(const ScalarField& a) {
    auto pa = a.impl_;
    PartialFn part;
    if (pa->part) part = [a](int j) { return (-1.0) * sin(a) * a.partial(j); };
    return make(a.dim(), [pa](const Vec& p) { return std::cos(pa->value(p)); }, part);
  }

  friend ScalarField exp(const ScalarField& a) {
    auto pa = a.impl_;
    PartialFn part;
    if (pa->part) part = [a](int j) { return exp(a) * a.partial(j); };
    return make(a.dim(), [pa](const Vec& p) { return std::exp(pa->value(p)); }, part);
  }

 private:
  struct Impl {
    int dim = 0;
    ValueFn value;
    PartialFn part;     // null when no derivative data
    bool zero = false;  // identically-zero constant, absorbing under products
  };

  static ScalarField make(int dim, ValueFn value, PartialFn part, bool zero = false) {
    ScalarField f;
    f.impl_ = std::make_shared<const Impl>(Impl{dim, std::move(value), std::move(part), zero});
    return f;
  }

  static void check_dims(const ScalarField& a, const ScalarField& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("ScalarField: dimension mismatch");
  }

  std::shared_ptr<const Impl> impl_;
};

}  // namespace multisym
