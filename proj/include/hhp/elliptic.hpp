#pragma once

// Two-parameter solutions y = ρ² + P₀ where ρ solves the quartic first-order
// equation
//   ρ_t² = ¼(Ãρ⁴ + B̃ρ³ + C̃ρ² + D̃ρ + Ẽ).
// Substituting into the fourth-order equation for y gives seven algebraic
// conditions on (Ã, B̃, C̃, D̃, Ẽ, P₀, H); this module produces exact solutions of
// them and the quantities derived from a solution.

#include <array>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "hhp/exact.hpp"
#include "hhp/model.hpp"
#include "hhp/painleve.hpp"

namespace hhp {

struct QuarticCoefficients {
  ExactScalar A, B, C, D, E;
  ExactScalar P0;
  ExactScalar G;  // coefficient of a ρ⁵ term; always 0 here
};

enum class RecordKind {
  Cubic,    // B̃ = D̃ = 0: y solves a cubic first-order equation
  LinearD,  // B̃ = 0, D̃ ≠ 0 (only in integrable cases)
  Quartic,  // B̃ ≠ 0 family given by closed forms in S or R
};

const char* to_string(RecordKind kind);

struct SignChoices {
  Branch radical = Branch::Plus;  // sign of S (C=−16/5) or R (C=−4/3)
  Branch root = Branch::Plus;     // sign of √F, flips B̃ and D̃ together
};

struct EllipticSolutionRecord {
  QuarticCoefficients coeffs;
  ModelParams params;  // mu holds the closed-form μ value, H the energy
  RecordKind kind = RecordKind::Cubic;
  // Records sharing a pair_id differ only in the signs of B̃ and D̃.
  int pair_id = 0;
  std::optional<SignChoices> signs;
  bool limit_resolved = false;  // B̃ denominator vanished; B̃ taken from the B̃² condition
};

enum class DenominatorPolicy { Strict, ResolveLimit };

struct SolveOptions {
  DenominatorPolicy policy = DenominatorPolicy::Strict;
  ExactScalar free_D = 1;  // value used for D̃ when it is unconstrained (LinearD records)
};

// All solutions of the seven conditions for the given constants: the B̃ = 0
// records for any C, plus the four closed-form B̃ ≠ 0 records for C = −16/5 and
// C = −4/3.
std::vector<EllipticSolutionRecord> solve_quartic_conditions(const ExactScalar& C, const ExactScalar& lambda1,
                                                  const ExactScalar& lambda2, const ExactScalar& P0,
                                                  const SolveOptions& options = {});

// Left minus right side of each of the seven conditions, in order.
std::array<ExactScalar, 7> quartic_condition_residuals(const EllipticSolutionRecord& rec);
std::array<ExactScalar, 7> quartic_condition_residuals(const QuarticCoefficients& q, const ModelParams& params);

// Energy forced by the last condition.
ExactScalar energy_from_coefficients(const QuarticCoefficients& q, const ModelParams& params);

// The closed-form μ polynomial in P₀, Ẽ, H, D̃. Its value is −2 times the
// coefficient μ of the μ/(2x²) term (see dynamical_mu).
ExactScalar mu_from_solution(const EllipticSolutionRecord& rec);
ExactScalar mu_closed_form(const QuarticCoefficients& q, const ModelParams& params);
// The μ that makes x(t) solve x_tt = −λ₁x − 2xy + μ/x³.
ExactScalar dynamical_mu(const EllipticSolutionRecord& rec);

// x² = y2·y² + y1·y + (radical_y·y + radical_const)·ρ + constant, ρ = √(y − P₀)
// on the branch of the solution ρ(t).
struct TrajectoryRelation {
  ExactScalar y2, y1, radical_y, radical_const, constant, P0;
};

TrajectoryRelation trajectory_coefficients(const EllipticSolutionRecord& rec);

// Polynomial in X = x² and y, keyed by (power of X, power of y).
using BivariatePolynomial = std::map<std::pair<int, int>, ExactScalar>;

// (X − y2·y² − y1·y − constant)² − (radical_y·y + radical_const)²·(y − P₀),
// the radical-free form of the trajectory relation.
BivariatePolynomial squared_trajectory(const TrajectoryRelation& rel);

// Real coefficients of the polynomial relation between y and y_t
//   (y_t² − Ãu³ − C̃u² − Ẽu)² − u³(B̃u + D̃)²,  u = y − P₀.
// Only B̃², B̃D̃ and D̃² enter, so it is real even when B̃ and D̃ are imaginary.
template <class Real>
struct PolynomialRelation {
  Real A, C, E, P0, BB, BD, DD;

  Real operator()(const Real& y, const Real& yt) const {
    Real u = y - P0;
    Real first = yt * yt - ((A * u + C) * u + E) * u;
    return first * first - u * u * u * ((BB * u + 2 * BD) * u + DD);
  }
};

template <class Real, class Convert>
PolynomialRelation<Real> polynomial_relation(const EllipticSolutionRecord& rec, Convert convert) {
  const auto& q = rec.coeffs;
  return {convert(q.A), convert(q.C), convert(q.E), convert(q.P0), convert(q.B * q.B), convert(q.B * q.D),
          convert(q.D * q.D)};
}

template <class Real, class Convert>
Real polynomial_relation_check(const EllipticSolutionRecord& rec, const Real& y, const Real& yt, Convert convert) {
  return polynomial_relation<Real>(rec, convert)(y, yt);
}

struct EnergyValue {
  ExactScalar H;
  bool x_squared_negative = false;
};

// H from a jet (y, y_t, y_tt, y_ttt) of the y-component, with
// x² = Cy² − λ₂y − y_tt and (x²)_t = 2Cyy_t − λ₂y_t − y_ttt. `mu` is the
// dynamical μ. Throws not-a-function when x² = 0.
EnergyValue energy_from_initial_data(const ExactScalar& y0, const ExactScalar& y0t, const ExactScalar& y0tt,
                                     const ExactScalar& y0ttt, const ExactScalar& mu, const ModelParams& params);

template <class Real>
struct EnergyValueReal {
  Real H;
  bool x_squared_negative = false;
};

template <class Real>
EnergyValueReal<Real> energy_from_initial_data(const Real& y, const Real& yt, const Real& ytt, const Real& yttt,
                                               const Real& mu, const Real& C, const Real& l1, const Real& l2) {
  Real X = C * y * y - l2 * y - ytt;
  if (X == 0) throw Error(ErrorKind::NotAFunction, "x0^2 = 0, H is not a function of the initial data");
  Real Xt = 2 * C * y * yt - l2 * yt - yttt;
  Real H = Xt * Xt / (8 * X) + yt * yt / 2 + l2 * y * y / 2 + (l1 / 2 + y) * X - C * y * y * y / 3 + mu / (2 * X);
  return {H, X < 0};
}

// y's Laurent series at a pole of ρ, to the given truncation order. The branch
// fixes the sign of ρ's residue relative to B̃ (or D̃); both records of a pair
// give the same series for the same branch.
LaurentSolution laurent_of_elliptic(const EllipticSolutionRecord& rec, int order, Branch branch = Branch::Plus);

}  // namespace hhp
