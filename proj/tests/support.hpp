#pragma once

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "hhp/elliptic.hpp"
#include "hhp/exact.hpp"
#include "hhp/fitter.hpp"
#include "hhp/numeric.hpp"
#include "hhp/series.hpp"

namespace hhp::testing {

inline Rational random_rational(std::mt19937_64& rng, long max_num = 40, long max_den = 12) {
  std::uniform_int_distribution<long> num(-max_num, max_num), den(1, max_den);
  return Rational(num(rng), den(rng));
}

inline Rational random_nonzero_rational(std::mt19937_64& rng, long max_num = 40, long max_den = 12) {
  for (;;) {
    Rational q = random_rational(rng, max_num, max_den);
    if (!q.is_zero()) return q;
  }
}

// Q(√2)(√(3+√2)) on the plus branch: both levels real.
inline TowerPtr real_tower() {
  static const TowerPtr t = [] {
    TowerPtr t1 = adjoin_sqrt(ExactScalar(2)).value.tower();
    ExactScalar d2 = ExactScalar(3) + ExactScalar::generator(t1);
    return adjoin_sqrt(d2, Branch::Plus, t1).value.tower();
  }();
  return t;
}

// Q(√−15)(√2), the tower of an imaginary-coefficient record.
inline TowerPtr imaginary_tower() {
  static const TowerPtr t = [] {
    TowerPtr t1 = adjoin_sqrt(ExactScalar(-15)).value.tower();
    return adjoin_sqrt(ExactScalar(2), Branch::Minus, t1).value.tower();
  }();
  return t;
}

inline ExactScalar random_element(std::mt19937_64& rng, const TowerPtr& tower) {
  std::vector<Rational> c(std::size_t{1} << (tower ? tower->depth() : 0));
  for (auto& q : c) q = random_rational(rng, 9, 5);
  return ExactScalar(tower, std::move(c));
}

inline LaurentSeries<ExactScalar> random_series(std::mt19937_64& rng, const TowerPtr& tower) {
  std::uniform_int_distribution<int> lead(-3, 1), len(1, 7), slack(0, 3);
  int first = lead(rng);
  int n = len(rng);
  std::vector<ExactScalar> c;
  for (int i = 0; i < n; ++i) c.push_back(random_element(rng, tower));
  c[0] = c[0].is_zero() ? ExactScalar(1) : c[0];
  return LaurentSeries<ExactScalar>(first, std::move(c), first + n + slack(rng));
}

// Small-amplitude orbit of the C=−16/5, λ₁=1/9, λ₂=1 system well below the
// lowest saddle energy (about 1.36e-3).
inline FlowState<Quad> random_bounded_state(std::mt19937_64& rng, const Quad& mu) {
  std::uniform_real_distribution<double> x(0.03, 0.08), y(-0.02, 0.02), v(-0.01, 0.01);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    FlowState<Quad> s{0, x(rng), v(rng), y(rng), v(rng)};
    Quad H = hamiltonian(s.x, s.xt, s.y, s.yt, Quad(-16) / 5, Quad(1) / 9, Quad(1), mu);
    if (H < Quad("1e-3")) return s;
  }
  throw std::runtime_error("no bounded initial state in the sampling box");
}

// Taylor coefficients y^(k)(t)/k!, k < n, of the elementary solution
//   y = −5/(3(1 − 3 sin((t − t0)/3))²)
// built from the sine series and a series reciprocal.
template <class Real>
std::vector<Real> elementary_solution_taylor(const Real& t, const Real& t0, int n) {
  using std::cos;
  using std::sin;
  Real theta = (t - t0) / 3;
  Real s = sin(theta), c = cos(theta);
  std::vector<Real> d(static_cast<std::size_t>(n));
  Real scale = 1;  // 1/(k!·3^k)
  for (int k = 0; k < n; ++k) {
    if (k > 0) scale /= 3 * k;
    const Real cycle[4] = {s, c, -s, -c};
    d[static_cast<std::size_t>(k)] = -3 * cycle[k % 4] * scale;
  }
  d[0] += 1;
  std::vector<Real> r(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
  r[0] = 1 / d[0];
  for (int k = 1; k < n; ++k) {
    Real acc = 0;
    for (int j = 1; j <= k; ++j) acc += d[static_cast<std::size_t>(j)] * r[static_cast<std::size_t>(k - j)];
    r[static_cast<std::size_t>(k)] = -acc / d[0];
  }
  for (int k = 0; k < n; ++k) {
    Real acc = 0;
    for (int j = 0; j <= k; ++j) acc += r[static_cast<std::size_t>(j)] * r[static_cast<std::size_t>(k - j)];
    y[static_cast<std::size_t>(k)] = Real(-5) / 3 * acc;
  }
  return y;
}

// Laurent expansion of −5/(3(1 − 3 sin(θ₀ + u/3))²), sin θ₀ = 1/3,
// cos θ₀ = σ·2√2/3, computed with plain coefficient lists.
inline std::vector<ExactScalar> elementary_solution_expansion(int sigma, int count) {
  ExactScalar cos0 = ExactScalar::ratio(2 * sigma, 3) * sqrt_exact(ExactScalar(2));
  int n = count + 2;
  std::vector<ExactScalar> sin_u(n + 2), cos_u(n + 2);
  Rational fact = 1, third = 1;
  for (int k = 0; k < n + 2; ++k) {
    if (k > 0) {
      fact *= k;
      third /= 3;
    }
    Rational term = third / fact;
    if (k % 2 == 0)
      cos_u[k] = ExactScalar((k / 2) % 2 ? -term : term);
    else
      sin_u[k] = ExactScalar(((k - 1) / 2) % 2 ? -term : term);
  }
  // D(u) = 1 − cos(u/3) − 3 cos θ₀ sin(u/3) = u·E(u); the constant terms cancel.
  std::vector<ExactScalar> E(n + 1);
  for (int k = 0; k <= n; ++k) E[k] = -cos_u[k + 1] - ExactScalar(3) * cos0 * sin_u[k + 1];
  std::vector<ExactScalar> inv(n + 1);  // 1/E
  inv[0] = E[0].inverse();
  for (int k = 1; k <= n; ++k) {
    ExactScalar s;
    for (int j = 1; j <= k; ++j) s += E[j] * inv[k - j];
    inv[k] = -s * inv[0];
  }
  std::vector<ExactScalar> out(count);  // coefficient of u^{k-2}
  for (int k = 0; k < count; ++k) {
    ExactScalar s;
    for (int j = 0; j <= k; ++j) s += inv[j] * inv[k - j];
    out[k] = ExactScalar::ratio(-5, 3) * s;
  }
  return out;
}

// Polynomials in (y, y_t) keyed by the exponent pair, expanded by hand as the
// oracle for the fitted coefficients.
using Poly = std::map<Monomial, ExactScalar>;

inline Poly mul(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) r[{ma.j + mb.j, ma.k + mb.k}] += ca * cb;
  return r;
}

inline Poly add(Poly a, const Poly& b, const ExactScalar& scale = 1) {
  for (const auto& [m, c] : b) a[m] += scale * c;
  return a;
}

inline Poly clean(Poly p) {
  std::erase_if(p, [](const auto& e) { return e.second.is_zero(); });
  return p;
}

// p(u) with u = y − P₀, p given by coefficients of u⁰, u¹, ...
inline Poly in_u(const std::vector<ExactScalar>& coeffs, const ExactScalar& P0) {
  Poly u{{{1, 0}, ExactScalar(1)}, {{0, 0}, -P0}};
  Poly power{{{0, 0}, ExactScalar(1)}}, out;
  for (const auto& c : coeffs) {
    out = add(out, power, c);
    power = mul(power, u);
  }
  return out;
}

// y_t² − Ãu³ − C̃u² − Ẽu
inline Poly cubic_equation(const QuarticCoefficients& c) {
  Poly yt2{{{0, 2}, ExactScalar(1)}};
  return clean(add(yt2, in_u({ExactScalar(0), c.E, c.C, c.A}, c.P0), ExactScalar(-1)));
}

// (y_t² − Ãu³ − C̃u² − Ẽu)² − u³(B̃u + D̃)²
inline Poly squared_quartic_equation(const QuarticCoefficients& c) {
  Poly first = cubic_equation(c);
  Poly second = in_u({ExactScalar(0), ExactScalar(0), ExactScalar(0), c.D * c.D, 2 * c.B * c.D, c.B * c.B}, c.P0);
  return clean(add(mul(first, first), second, ExactScalar(-1)));
}

}  // namespace hhp::testing
