#pragma once

// Truncated Laurent series  Σ_{k=lead}^{trunc-1} c_k t^k + O(t^trunc)
// over an exact or floating scalar ring.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hhp/errors.hpp"

namespace hhp {

template <class Scalar>
class LaurentSeries {
 public:
  LaurentSeries() = default;

  // Coefficients for powers first, first+1, ...; leading zeros are trimmed.
  LaurentSeries(int first, std::vector<Scalar> coeffs, int truncation)
      : lead_(first), trunc_(truncation), coeffs_(std::move(coeffs)) {
    if (first + static_cast<int>(coeffs_.size()) > truncation)
      throw Error(ErrorKind::Window, "coefficients extend past the truncation order");
    trim();
  }

  static LaurentSeries zero(int truncation) {
    LaurentSeries s;
    s.lead_ = truncation;
    s.trunc_ = truncation;
    return s;
  }

  static LaurentSeries monomial(const Scalar& c, int power, int truncation) {
    if (power >= truncation) throw Error(ErrorKind::Window, "monomial outside the truncation window");
    return LaurentSeries(power, {c}, truncation);
  }

  bool is_zero() const { return coeffs_.empty(); }
  // Exponent of the first nonzero coefficient; equals the truncation order for
  // the zero series.
  int leading_exponent() const { return lead_; }
  int truncation_order() const { return trunc_; }
  const std::vector<Scalar>& coefficients() const { return coeffs_; }
  const Scalar& leading_coefficient() const { return coeffs_.front(); }

  // Coefficient of t^power; zero below the leading exponent, an error at or
  // above the truncation order.
  Scalar coefficient(int power) const {
    if (power >= trunc_)
      throw Error(ErrorKind::Window, "coefficient of t^" + std::to_string(power) +
                                         " requested beyond truncation order " + std::to_string(trunc_));
    if (power < lead_ || power >= lead_ + static_cast<int>(coeffs_.size())) return Scalar(0);
    return coeffs_[static_cast<std::size_t>(power - lead_)];
  }

  // The same series known only below a smaller truncation order.
  LaurentSeries truncated(int truncation) const {
    if (truncation > trunc_)
      throw Error(ErrorKind::Window, "cannot extend a series past its truncation order");
    if (truncation <= lead_) return zero(truncation);
    std::vector<Scalar> c(coeffs_.begin(),
                          coeffs_.begin() + std::min<std::ptrdiff_t>(coeffs_.size(), truncation - lead_));
    return LaurentSeries(lead_, std::move(c), truncation);
  }

  LaurentSeries operator-() const {
    LaurentSeries r(*this);
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
    int trunc = std::min(a.trunc_, b.trunc_);
    int first = std::min(a.lead_, b.lead_);
    if (first >= trunc) return zero(trunc);
    std::vector<Scalar> c(static_cast<std::size_t>(trunc - first), Scalar(0));
    for (int p = first; p < trunc; ++p) {
      auto& slot = c[static_cast<std::size_t>(p - first)];
      if (a.holds(p)) slot += a.at(p);
      if (b.holds(p)) slot += b.at(p);
    }
    return LaurentSeries(first, std::move(c), trunc);
  }

  friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return a + (-b); }

  // Valid up to min(lead_a + trunc_b, lead_b + trunc_a): the relative precision
  // of each factor bounds that of the product.
  friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    int trunc = std::min(a.lead_ + b.trunc_, b.lead_ + a.trunc_);
    if (a.is_zero() || b.is_zero()) return zero(trunc);
    int first = a.lead_ + b.lead_;
    if (first >= trunc) return zero(trunc);
    std::vector<Scalar> c(static_cast<std::size_t>(trunc - first), Scalar(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      for (std::size_t j = 0; j < b.coeffs_.size() && i + j < c.size(); ++j) {
        c[i + j] += a.coeffs_[i] * b.coeffs_[j];
      }
    }
    return LaurentSeries(first, std::move(c), trunc);
  }

  friend LaurentSeries operator*(const Scalar& s, const LaurentSeries& a) {
    LaurentSeries r(a);
    for (auto& c : r.coeffs_) c = s * c;
    r.trim();
    return r;
  }

 private:
  bool holds(int p) const { return p >= lead_ && p < lead_ + static_cast<int>(coeffs_.size()); }
  const Scalar& at(int p) const { return coeffs_[static_cast<std::size_t>(p - lead_)]; }

  void trim() {
    std::size_t k = 0;
    while (k < coeffs_.size() && coeffs_[k] == Scalar(0)) ++k;
    if (k == coeffs_.size()) {
      coeffs_.clear();
      lead_ = trunc_;
      return;
    }
    coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(k));
    lead_ += static_cast<int>(k);
    while (!coeffs_.empty() && coeffs_.back() == Scalar(0)) coeffs_.pop_back();
  }

  int lead_ = 0;
  int trunc_ = 0;
  std::vector<Scalar> coeffs_;
};

template <class Scalar>
LaurentSeries<Scalar> diff(const LaurentSeries<Scalar>& a) {
  int trunc = a.truncation_order() - 1;
  if (a.is_zero()) return LaurentSeries<Scalar>::zero(trunc);
  int first = a.leading_exponent();
  const auto& c = a.coefficients();
  std::vector<Scalar> d(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) d[i] = Scalar(first + static_cast<int>(i)) * c[i];
  // The constant term maps to zero; the trimming constructor drops it.
  return LaurentSeries<Scalar>(first - 1, std::move(d), trunc);
}

template <class Scalar>
LaurentSeries<Scalar> diff(const LaurentSeries<Scalar>& a, int times) {
  LaurentSeries<Scalar> r = a;
  for (int i = 0; i < times; ++i) r = diff(r);
  return r;
}

template <class Scalar>
LaurentSeries<Scalar> pow(const LaurentSeries<Scalar>& a, int n) {
  if (n < 1) throw Error(ErrorKind::Domain, "series power must be positive");
  LaurentSeries<Scalar> r = a;
  for (int i = 1; i < n; ++i) r = r * a;
  return r;
}

template <class Real>
struct SeriesValue {
  Real value;
  Real tail_bound;  // |last retained term| at t
};

// Horner evaluation of the retained terms. `convert` maps a coefficient to Real.
template <class Real, class Scalar, class Convert>
SeriesValue<Real> eval(const LaurentSeries<Scalar>& a, const Real& t, Convert convert) {
  if (a.is_zero()) return {Real(0), Real(0)};
  int first = a.leading_exponent();
  const auto& c = a.coefficients();
  if (t == 0) {
    if (first < 0) throw Error(ErrorKind::Pole, "evaluation at the pole t=0");
    return {first == 0 ? convert(c[0]) : Real(0), Real(0)};
  }
  Real acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + convert(c[i]);
  using std::abs;
  using std::pow;
  Real scale = pow(t, first);
  Real last = abs(convert(c.back()) * pow(t, first + static_cast<int>(c.size()) - 1));
  return {acc * scale, last};
}

template <class Real, class Scalar>
SeriesValue<Real> eval(const LaurentSeries<Scalar>& a, const Real& t) {
  return eval(a, t, [](const Scalar& s) { return Real(s); });
}

}  // namespace hhp
