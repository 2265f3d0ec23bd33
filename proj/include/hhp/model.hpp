#pragma once

// The generalized Hénon–Heiles model
//   H = ½(x_t² + y_t² + λ₁x² + λ₂y²) + x²y − (C/3)y³ + μ/(2x²)
// and its fourth-order reduction for y(t).

#include <optional>

#include "hhp/exact.hpp"
#include "hhp/series.hpp"

namespace hhp {

struct ModelParams {
  ExactScalar C;
  ExactScalar lambda1;
  ExactScalar lambda2;
  std::optional<ExactScalar> mu;
  std::optional<ExactScalar> H;
};

// y'''' − (2C−8)y''y + (4λ₁+λ₂)y'' − 2(C+1)y'² − (20C/3)y³ − (4Cλ₁−6λ₂)y² + 4λ₁λ₂y + 4H
template <class S>
LaurentSeries<S> fourth_order_residual(const LaurentSeries<S>& y, const S& C, const S& l1, const S& l2, const S& H) {
  auto y1 = diff(y);
  auto y2 = diff(y1);
  auto y4 = diff(y2, 2);
  auto y_sq = y * y;
  LaurentSeries<S> r = y4 - (S(2) * C - S(8)) * (y2 * y) + (S(4) * l1 + l2) * y2 - (S(2) * (C + S(1))) * (y1 * y1) -
                       (S(20) * C / S(3)) * (y_sq * y) - (S(4) * C * l1 - S(6) * l2) * y_sq +
                       (S(4) * l1 * l2) * y;
  if (!(H == S(0)) && r.truncation_order() > 0) r = r + LaurentSeries<S>::monomial(S(4) * H, 0, r.truncation_order());
  return r;
}

// Fourth derivative of y from its jet according to the fourth-order equation.
template <class R>
R fourth_order_derivative(const R& y, const R& yt, const R& ytt, const R& C, const R& l1, const R& l2, const R& H) {
  return (2 * C - 8) * ytt * y - (4 * l1 + l2) * ytt + 2 * (C + 1) * yt * yt + (20 * C / 3) * y * y * y +
         (4 * C * l1 - 6 * l2) * y * y - 4 * l1 * l2 * y - 4 * H;
}

// Hamiltonian of the two-degree-of-freedom system.
template <class R>
R hamiltonian(const R& x, const R& xt, const R& y, const R& yt, const R& C, const R& l1, const R& l2, const R& mu) {
  R e = (xt * xt + yt * yt + l1 * x * x + l2 * y * y) / 2 + x * x * y - C * y * y * y / 3;
  if (mu != 0) e += mu / (2 * x * x);
  return e;
}

}  // namespace hhp
